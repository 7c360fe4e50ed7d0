use slpn::attacks::brute_force_decode;
use slpn::attacks::Metric;
use slpn::gf2::{pair_weight, symp_dot, SympVec};
use slpn::harness::chi_square_gof;
use slpn::reductions::{
    convolve_pairs, convolve_param, drop_bit_transform, dual_mode_transform,
    interpolation_select, lpn_drop_bits, lsn_to_symplpn, lsn_to_symplpn_instance, pair_distribution,
    symmetrize_noise, symmetrize_overlay, Branch, BruteForceOracle, CoinOracle, Decision,
    DropBitConfig, Oracle, ReductionReport, WitnessOracle,
};
use slpn::sampling::{gen_lpn, gen_lsn, gen_lsn_with, gen_symplpn};
use slpn::{BitVec, Error, Rng};

fn lsn_success(oracle: &dyn Oracle, k: usize, n: usize, p: f64, trials: usize, seed: u64) -> f64 {
    let mut rng = Rng::new(seed);
    let mut hits = 0;
    for _ in 0..trials {
        let inst = gen_lsn(&mut rng, k, n, p).unwrap();
        let y = inst.witness.as_ref().unwrap().secret.extract(n, k);
        if lsn_to_symplpn(&inst, oracle, &mut rng).unwrap() == y {
            hits += 1;
        }
    }
    hits as f64 / trials as f64
}

#[test]
fn lsn_zero_y_with_perfect_oracle_outputs_zero() {
    let mut rng = Rng::new(1);
    for _ in 0..200 {
        let inst = gen_lsn_with(&mut rng, 3, 6, 0.1, true).unwrap();
        let reduced = lsn_to_symplpn_instance(&inst).unwrap();
        assert_eq!(reduced.matrix, inst.lsn_a());
        assert_eq!(reduced.word, inst.word);
        let y = lsn_to_symplpn(&inst, &WitnessOracle, &mut rng).unwrap();
        assert!(y.is_zero());
    }
}

#[test]
fn lsn_perfect_oracle_at_k1_always_succeeds() {
    let s = lsn_success(&WitnessOracle, 1, 4, 0.1, 1000, 2);
    assert!(s >= 0.99, "{s}");
}

#[test]
fn lsn_coin_oracle_is_at_baseline() {
    // Guess 0 w.p. 1/2, else a uniform nonzero y: success 2^-k exactly.
    let trials = 20_000;
    let s = lsn_success(&CoinOracle, 2, 4, 0.1, trials, 3);
    let sd = (0.25 * 0.75 / trials as f64).sqrt();
    assert!((s - 0.25).abs() < 4.0 * sd, "{s}");
}

#[test]
fn lsn_brute_force_oracle_beats_guessing() {
    let s = lsn_success(&BruteForceOracle::default(), 1, 4, 0.1, 1000, 4);
    assert!(s > 0.6, "{s}");
}

#[test]
fn lsn_reduction_rejects_other_kinds() {
    let mut rng = Rng::new(5);
    let inst = gen_symplpn(&mut rng, 2, 4, 0.1, true).unwrap();
    assert!(lsn_to_symplpn(&inst, &CoinOracle, &mut rng).is_err());
}

#[test]
fn convolution_is_associative() {
    let grid: Vec<f64> = (0..=15).map(|i| 0.05 * i as f64).collect();
    for &p in &grid {
        for &q in grid.iter().filter(|&&q| q >= p) {
            for &r in grid.iter().filter(|&&r| r >= q) {
                let u1 = convolve_param(p, q).unwrap();
                let u2 = convolve_param(q, r).unwrap();
                let lhs = convolve_pairs(
                    &convolve_pairs(&pair_distribution(p), &pair_distribution(u1)),
                    &pair_distribution(u2),
                );
                let rhs = pair_distribution(r);
                for i in 0..4 {
                    assert!((lhs[i] - rhs[i]).abs() < 1e-12, "p={p} q={q} r={r}");
                }
            }
        }
    }
}

#[test]
fn symmetrize_with_every_pair_noisy_is_uniform() {
    let mut rng = Rng::new(6);
    let n = 2;
    let mut e = SympVec::zeros(n);
    e.set_pair(0, (true, false));
    e.set_pair(1, (true, true));
    let trials = 160_000;
    let mut counts = vec![0u64; 16];
    for _ in 0..trials {
        let s = symmetrize_noise(&mut rng, &e, &[0, 1]).unwrap();
        counts[s.e.bits().to_u64() as usize] += 1;
        assert_eq!(s.resamples, 0);
    }
    let chi = chi_square_gof(&counts, &[1.0 / 16.0; 16]).unwrap();
    assert!(chi.p_value > 1e-3, "{chi:?}");
}

#[test]
fn symmetrize_moves_whole_pairs() {
    let mut rng = Rng::new(7);
    let n = 6;
    for _ in 0..500 {
        let o = symmetrize_overlay(&mut rng, n, &[1, 4]).unwrap();
        let mut sorted = o.perm.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..n).collect::<Vec<_>>());
        let base = o.apply(&BitVec::zeros(2 * n));
        for j in 0..n {
            for (x, z) in [(true, false), (false, true), (true, true)] {
                let mut v = SympVec::zeros(n);
                v.set_pair(j, (x, z));
                let moved = SympVec::new(o.apply(v.bits()).xor(&base)).unwrap();
                assert_eq!(moved.pair(o.perm[j]), (x, z));
                assert_eq!(moved.pair_weight(), 1);
            }
        }
        // Overlay covers M and nothing beyond T ≤ n pairs.
        let ov = SympVec::new(o.overlay.clone()).unwrap();
        assert!(ov.pair_weight() <= n);
    }
}

#[test]
fn symmetrize_rejects_noise_outside_set() {
    let mut rng = Rng::new(8);
    let mut e = SympVec::zeros(4);
    e.set_pair(3, (false, true));
    assert!(matches!(
        symmetrize_noise(&mut rng, &e, &[0, 1]),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn drop_bit_good_event_decodes_under_brute_force() {
    let mut rng = Rng::new(9);
    let n = 4;
    let mut seen = 0;
    while seen < 300 {
        let inst = gen_symplpn(&mut rng, n, n, 0.1, true).unwrap();
        let e = &inst.witness.as_ref().unwrap().error;
        if e.get(0) || e.get(n) {
            continue;
        }
        let t = match drop_bit_transform(&inst, Branch::Plain, &DropBitConfig::default(), &mut rng) {
            Ok(t) => t,
            Err(Error::Degenerate(_)) => continue,
            Err(err) => panic!("{err}"),
        };
        seen += 1;
        let w = t.instance.witness.as_ref().unwrap();
        assert!(w.structured);
        assert_eq!(t.instance.matrix.mul_vec(&w.secret).xor(&w.error), t.instance.word);
        let d = brute_force_decode(&t.instance.matrix, &t.instance.word, Metric::Pair).unwrap();
        assert!(d.weight <= pair_weight(&w.error));
    }
}

#[test]
fn drop_bit_rejects_wrong_shape() {
    let mut rng = Rng::new(10);
    let inst = gen_symplpn(&mut rng, 3, 4, 0.1, true).unwrap();
    assert!(drop_bit_transform(&inst, Branch::Plain, &DropBitConfig::default(), &mut rng).is_err());
}

#[test]
fn drop_bit_with_good_event_oracle_has_plain_advantage() {
    // The traced witness is structured only when the reduction kept the
    // input on the code; answering from it isolates the good event.
    let (n, p, trials) = (4, 0.1, 2000);
    let mut rng = Rng::new(11);
    let cfg = DropBitConfig::default();
    let report = |branch: Branch, rng: &mut Rng| {
        let mut said = [0usize; 2];
        for arm in 0..2 {
            let mut done = 0;
            while done < trials {
                let inst = gen_symplpn(rng, n, n, p, arm == 0).unwrap();
                let Ok(t) = drop_bit_transform(&inst, branch, &cfg, rng) else {
                    continue;
                };
                done += 1;
                if WitnessOracle.decide(&t.instance, rng) == Decision::Structured {
                    said[arm] += 1;
                }
            }
        }
        ReductionReport::from_counts(Some(branch), trials, said[0], said[1], 0)
    };
    let plain = report(Branch::Plain, &mut rng);
    let flooded = report(Branch::Flooded, &mut rng);
    assert!(plain.ci_low > 0.0, "{plain:?}");
    assert_eq!(plain.false_positives, 0);
    let pick = interpolation_select(&plain, &flooded);
    let best = if pick == Branch::Plain { &plain } else { &flooded };
    assert!(best.advantage.abs() >= plain.advantage.abs().min(flooded.advantage.abs()));
}

#[test]
fn dual_mode_columns_lie_in_dual_and_w_is_uniform() {
    let mut rng = Rng::new(12);
    let n = 3;
    let trials = 40_000;
    let mut counts = vec![0u64; 1 << (n + 1)];
    for _ in 0..trials {
        let inst = gen_symplpn(&mut rng, n - 1, n, 0.1, false).unwrap();
        let d = dual_mode_transform(&inst, &mut rng).unwrap();
        assert_eq!(d.h.rank(), n + 1);
        for h in d.h.col_vecs() {
            for a in inst.matrix.col_vecs() {
                assert!(!symp_dot(&a, &h));
            }
        }
        counts[d.w.to_u64() as usize] += 1;
    }
    let probs = vec![1.0 / counts.len() as f64; counts.len()];
    let chi = chi_square_gof(&counts, &probs).unwrap();
    assert!(chi.p_value > 1e-3, "{chi:?}");
}

#[test]
fn dual_mode_structured_word_depends_only_on_noise() {
    let mut rng = Rng::new(13);
    for _ in 0..500 {
        let inst = gen_symplpn(&mut rng, 4, 5, 0.2, true).unwrap();
        let e = &inst.witness.as_ref().unwrap().error;
        let d = dual_mode_transform(&inst, &mut rng).unwrap();
        let expect: Vec<bool> = d.h.col_vecs().iter().map(|h| symp_dot(e, h)).collect();
        assert_eq!(d.w, BitVec::from_bools(&expect));
    }
}

#[test]
fn lpn_zero_tail_is_structured() {
    let mut rng = Rng::new(14);
    for _ in 0..300 {
        let mut inst = gen_lpn(&mut rng, 6, 16, 0.1, true).unwrap();
        let w = inst.witness.as_mut().unwrap();
        for i in 4..6 {
            w.secret.set(i, false);
        }
        inst.word = inst.matrix.mul_vec(&w.secret).xor(&w.error);
        assert_eq!(lpn_drop_bits(&inst, 2, &WitnessOracle, &mut rng).unwrap(), Decision::Structured);
    }
}

#[test]
fn lpn_drop_advantage_scales_with_dropped_bits() {
    let (k, n, trials) = (6, 16, 4000);
    for k_drop in [1, 2] {
        let mut rng = Rng::new(15 + k_drop as u64);
        let mut said = [0usize; 2];
        for arm in 0..2 {
            for _ in 0..trials {
                let inst = gen_lpn(&mut rng, k, n, 0.0, arm == 0).unwrap().without_witness();
                let d = lpn_drop_bits(&inst, k_drop, &BruteForceOracle::default(), &mut rng).unwrap();
                said[arm] += usize::from(d == Decision::Structured);
            }
        }
        let adv = (said[0] as f64 - said[1] as f64) / trials as f64;
        let target = 1.0 / (1u64 << k_drop) as f64;
        assert!((adv - target).abs() < 0.04, "k'={k_drop}: {adv}");
    }
}

#[test]
fn lpn_drop_rejects_dropping_everything() {
    let mut rng = Rng::new(17);
    let inst = gen_lpn(&mut rng, 3, 8, 0.1, true).unwrap();
    assert!(lpn_drop_bits(&inst, 3, &CoinOracle, &mut rng).is_err());
}
