mod common;

use std::collections::BTreeSet;

use common::{ambient, gamma_counts_brute, random_complex, Brute};
use lmstab::topology::{ball_k, components, connected_within, distances, gamma_counts, m_ball, Center};

#[test]
fn bfs_distances_match_path_enumeration() {
    for (n, d) in [(6, 1), (7, 2), (7, 3)] {
        let brute = Brute::new(n, d);
        let amb = ambient(n, d);
        for seed in 0..40u64 {
            let x = random_complex(n, d, 0.35, seed);
            let present = brute.present_mask(&x);
            let src = (seed as usize * 7) % brute.faces.len();
            let dist = distances(&x, &[amb.rank_of(&brute.faces[src])], 4);
            for (fi, face) in brute.faces.iter().enumerate() {
                let expected = brute.shortest_path(&present, src, fi, 4);
                assert_eq!(dist.get(amb.rank_of(face)), expected, "n={n} d={d} seed={seed} face={face:?}");
            }
        }
    }
}

#[test]
fn balls_match_path_enumeration() {
    let (n, d) = (7, 2);
    let brute = Brute::new(n, d);
    let amb = ambient(n, d);
    for seed in 0..30u64 {
        let x = random_complex(n, d, 0.3, 100 + seed);
        let present = brute.present_mask(&x);
        for k in 0..=3 {
            let fi = seed as usize % brute.faces.len();
            let got: BTreeSet<u64> =
                ball_k(&x, Center::Face(amb.rank_of(&brute.faces[fi])), k).simplices.into_iter().collect();
            let want: BTreeSet<u64> =
                brute.reachable_tops(&present, &[fi], k).into_iter().map(|t| amb.rank_of(&brute.tops[t])).collect();
            assert_eq!(got, want, "face seed={seed} k={k}");

            let ti = seed as usize % brute.tops.len();
            let got: BTreeSet<u64> =
                ball_k(&x, Center::Top(amb.rank_of(&brute.tops[ti])), k).simplices.into_iter().collect();
            let want: BTreeSet<u64> = brute
                .reachable_tops(&present, &brute.top_faces[ti], k)
                .into_iter()
                .map(|t| amb.rank_of(&brute.tops[t]))
                .collect();
            assert_eq!(got, want, "top seed={seed} k={k}");
        }
    }
}

#[test]
fn balls_grow_with_radius() {
    let x = random_complex(9, 2, 0.25, 5);
    let amb = x.ambient().clone();
    let tau = amb.rank_of(&[0, 1, 2]);
    let mut prev: BTreeSet<u64> = BTreeSet::new();
    for k in 0..6 {
        let now: BTreeSet<u64> = ball_k(&x, Center::Top(tau), k).simplices.into_iter().collect();
        assert!(prev.is_subset(&now));
        prev = now;
    }
}

#[test]
fn m_ball_faces_are_generated() {
    let x = random_complex(8, 2, 0.3, 11);
    let amb = x.ambient().clone();
    for f in 0..amb.face_count() {
        let view = m_ball(&x, Center::Face(f), 2);
        let faces = view.faces();
        assert!(faces.contains(&f));
        let mut generated: BTreeSet<u64> = BTreeSet::from([f]);
        for &t in &view.simplices {
            generated.extend(amb.top_face_ranks(t));
        }
        assert_eq!(faces, generated.into_iter().collect::<Vec<_>>());
    }
}

#[test]
fn components_partition_the_faces() {
    for (n, d, p) in [(8, 1, 0.2), (8, 2, 0.12), (7, 3, 0.1)] {
        let brute = Brute::new(n, d);
        let amb = ambient(n, d);
        for seed in 0..25u64 {
            let x = random_complex(n, d, p, seed);
            let labels = components(&x);
            let mut seen = BTreeSet::new();
            let mut tops = BTreeSet::new();
            for c in &labels.components {
                assert!(c.faces.windows(2).all(|w| w[0] < w[1]));
                for &f in &c.faces {
                    assert!(seen.insert(f), "face {f} in two components");
                }
                tops.extend(c.tops.iter().copied());
            }
            assert_eq!(seen.len() as u64, amb.face_count());
            assert_eq!(tops.into_iter().collect::<Vec<_>>(), x.present().to_vec());
            let want: BTreeSet<BTreeSet<u64>> = brute
                .components(&brute.present_mask(&x))
                .into_iter()
                .map(|c| c.into_iter().map(|fi| amb.rank_of(&brute.faces[fi])).collect())
                .collect();
            let got: BTreeSet<BTreeSet<u64>> =
                labels.components.iter().map(|c| c.faces.iter().copied().collect()).collect();
            assert_eq!(got, want);
            let firsts: Vec<u64> = labels.components.iter().map(|c| c.faces[0]).collect();
            assert!(firsts.windows(2).all(|w| w[0] < w[1]), "components ordered by smallest face");
        }
    }
}

#[test]
fn connectivity_is_symmetric() {
    let x = random_complex(8, 2, 0.3, 2);
    let faces = x.ambient().face_count();
    for a in 0..faces {
        for b in (a..faces).step_by(5) {
            for k in 0..4 {
                assert_eq!(connected_within(&x, a, b, k), connected_within(&x, b, a, k));
            }
        }
    }
}

#[test]
fn gamma_counts_match_path_enumeration_small() {
    for (n, d) in [(4, 1), (5, 1), (5, 2)] {
        let amb = ambient(n, d);
        let a: Vec<usize> = (0..d).collect();
        let b: Vec<usize> = (d..2 * d).collect();
        let brute = gamma_counts_brute(n, d, &a, &b, 4);
        for k in 1..=4 {
            let got = gamma_counts(&amb, amb.rank_of(&a), amb.rank_of(&b), k).unwrap();
            assert_eq!(got, brute[k], "n={n} d={d} k={k}");
        }
    }
}

#[test]
fn gamma_guard() {
    let amb = ambient(7, 2);
    assert!(gamma_counts(&amb, 0, 5, 2).is_err());
}
