//! Property suite: every module invariant under randomized inputs.

use proptest::prelude::*;

use foeseg::camera_motion::flow_existing_ratio;
use foeseg::error::Error;
use foeseg::eval::frame_iou;
use foeseg::flow_io::{read_flo, write_flo, FlowField, FLO_MAGIC};
use foeseg::foe::{
    angular_deviation, expected_direction, foe_from_pair, ransac_foe, FoeSign, RansacParams,
    SignedFoe,
};
use foeseg::likelihood::{
    angle_probability, foe_likelihood, length_factor, likelihood_map, posterior_map,
    relative_length, LikelihoodParams,
};
use foeseg::pgm;
use foeseg::refine::object_mask;
use foeseg::seg_prior::{load_class_table, prior_map, static_mask, PanopticMap};
use foeseg::synth::{
    ground_truth_foe, render_flow, Background, CameraIntrinsics, CameraMotion, SceneSpec,
};
use foeseg::types::{BinaryMask, ProbabilityMap};

const CASES: u32 = 1000;

fn cfg() -> ProptestConfig {
    ProptestConfig {
        cases: CASES,
        ..ProptestConfig::default()
    }
}

// --- strategies ---------------------------------------------------------

prop_compose! {
    fn arb_flow_field()(w in 1usize..8, h in 1usize..8)
        (w in Just(w), h in Just(h),
         u in prop::collection::vec(-100.0f32..100.0, w * h),
         v in prop::collection::vec(-100.0f32..100.0, w * h),
         valid in prop::collection::vec(any::<bool>(), w * h))
        -> FlowField
    {
        FlowField::from_components(w, h, u, v, valid)
    }
}

prop_compose! {
    fn arb_mask(w: usize, h: usize)(bits in prop::collection::vec(any::<bool>(), w * h)) -> BinaryMask {
        BinaryMask::from_vec(w, h, bits)
    }
}

fn finite_pair() -> impl Strategy<Value = ((f64, f64), (f64, f64), (f64, f64), (f64, f64))> {
    let pos = (-50.0f64..50.0, -50.0f64..50.0);
    let flow = (-10.0f64..10.0, -10.0f64..10.0);
    (pos.clone(), flow.clone(), pos, flow).prop_filter("nonzero flows, distinct points",
        |(p1, f1, p2, f2)| {
            f1.0.hypot(f1.1) > 1e-3 && f2.0.hypot(f2.1) > 1e-3 && p1 != p2
        })
}

fn assert_foe_close(a: &SignedFoe, b: &SignedFoe, tol: f64) {
    let ha = a.homogeneous();
    let hb = b.homogeneous();
    for k in 0..3 {
        assert!((ha[k] - hb[k]).abs() <= tol, "{ha:?} vs {hb:?}");
    }
    assert_eq!(a.sign(), b.sign());
}

// --- flow_io -------------------------------------------------------------

proptest! {
    #![proptest_config(cfg())]

    /// read_flo(write_flo(f)) reproduces f bit-exactly on valid pixels.
    #[test]
    fn flo_roundtrip_bit_exact(field in arb_flow_field()) {
        let mut buf = Vec::new();
        write_flo(&field, &mut buf).unwrap();
        let back = read_flo(buf.as_slice()).unwrap();
        prop_assert_eq!(back.width(), field.width());
        prop_assert_eq!(back.height(), field.height());
        for idx in 0..field.len() {
            prop_assert_eq!(back.is_valid(idx), field.is_valid(idx));
            if field.is_valid(idx) {
                let (u0, v0) = field.uv(idx);
                let (u1, v1) = back.uv(idx);
                prop_assert_eq!(u0.to_bits(), u1.to_bits());
                prop_assert_eq!(v0.to_bits(), v1.to_bits());
            }
        }
    }

    /// Any perturbed sentinel is rejected.
    #[test]
    fn flo_perturbed_sentinel_rejected(bits in any::<u32>()) {
        prop_assume!(bits != FLO_MAGIC.to_bits());
        let mut stream = Vec::new();
        stream.extend_from_slice(&bits.to_le_bytes());
        stream.extend_from_slice(&1i32.to_le_bytes());
        stream.extend_from_slice(&1i32.to_le_bytes());
        stream.extend_from_slice(&1.0f32.to_le_bytes());
        stream.extend_from_slice(&1.0f32.to_le_bytes());
        let rejected = matches!(read_flo(stream.as_slice()), Err(Error::BadMagic { .. }));
        prop_assert!(rejected);
    }

    /// 16-bit PGM roundtrip is exact.
    #[test]
    fn pgm16_roundtrip(w in 1usize..6, h in 1usize..6, seed in any::<u64>()) {
        let mut state = seed;
        let data: Vec<u16> = (0..w * h).map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 48) as u16
        }).collect();
        let mut buf = Vec::new();
        pgm::write_pgm16(&mut buf, w, h, &data).unwrap();
        let back = pgm::read_pgm(buf.as_slice()).unwrap();
        prop_assert_eq!(back.data, data);
    }
}

// --- segmentation prior ---------------------------------------------------

proptest! {
    #![proptest_config(cfg())]

    /// prior_map emits exactly the table priors of the classes present.
    #[test]
    fn prior_map_values_come_from_table(
        (w, h, classes) in (1usize..6, 1usize..6).prop_flat_map(|(w, h)| {
            (Just(w), Just(h), prop::collection::vec(0u16..5, w * h))
        }),
    ) {
        let table = load_class_table(
            "0 0.02 - ground\n1 0.5 - bag\n2 0.9 - car\n3 0.02 sky sky\n4 0.25 - cart\n"
                .as_bytes(),
        ).unwrap();
        let seg = PanopticMap::new(w, h, classes.clone(), vec![0; classes.len()]);
        let map = prior_map(&seg, &table).unwrap();
        for idx in 0..classes.len() {
            prop_assert_eq!(map.get(idx), table.get(classes[idx]).unwrap().prior);
        }
    }

    /// static_mask AND (prior >= tau) is empty.
    #[test]
    fn static_mask_never_contains_high_priors(
        priors in prop::collection::vec(0.0f64..=1.0, 1..49),
        tau in 0.01f64..0.99,
    ) {
        let w = priors.len();
        let map = ProbabilityMap::from_fn(w, 1, |x, _| priors[x]);
        let mask = static_mask(&map, tau);
        for idx in 0..w {
            prop_assert!(!(mask.get(idx) && priors[idx] >= tau));
        }
    }
}

// --- camera motion ---------------------------------------------------------

proptest! {
    #![proptest_config(cfg())]

    /// Increasing one static pixel's magnitude never decreases the ratio.
    #[test]
    fn ratio_monotone_in_magnitude(
        field in arb_flow_field(),
        pick in any::<prop::sample::Index>(),
        scale in 1.0f32..50.0,
    ) {
        let w = field.width();
        let h = field.height();
        let static_area = BinaryMask::from_vec(w, h, vec![true; w * h]);
        prop_assume!(field.valid_count() > 0);
        let before = flow_existing_ratio(&field, &static_area, 0.5).unwrap();

        let mut bumped = field.clone();
        let idx = pick.index(bumped.len());
        let (u, v) = bumped.uv(idx);
        bumped.set(idx, u * scale, v * scale);
        let after = flow_existing_ratio(&bumped, &static_area, 0.5).unwrap();
        prop_assert!(after >= before);
    }

    /// The ratio is invariant under pixel permutation.
    #[test]
    fn ratio_permutation_invariant(field in arb_flow_field(), seed in any::<u64>()) {
        prop_assume!(field.valid_count() > 0);
        let n = field.len();
        // Deterministic Fisher-Yates from the seed.
        let mut order: Vec<usize> = (0..n).collect();
        let mut state = seed;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            order.swap(i, j);
        }
        let mut u = vec![0.0f32; n];
        let mut v = vec![0.0f32; n];
        let mut valid = vec![false; n];
        for (dst, &src) in order.iter().enumerate() {
            let (su, sv) = field.uv(src);
            u[dst] = su;
            v[dst] = sv;
            valid[dst] = field.is_valid(src);
        }
        let permuted = FlowField::from_components(n, 1, u, v, valid);
        let flat = {
            let (fu, fv, fvalid): (Vec<f32>, Vec<f32>, Vec<bool>) = (
                (0..n).map(|i| field.uv(i).0).collect(),
                (0..n).map(|i| field.uv(i).1).collect(),
                (0..n).map(|i| field.is_valid(i)).collect(),
            );
            FlowField::from_components(n, 1, fu, fv, fvalid)
        };
        let all = BinaryMask::from_vec(n, 1, vec![true; n]);
        let a = flow_existing_ratio(&flat, &all, 0.5).unwrap();
        let b = flow_existing_ratio(&permuted, &all, 0.5).unwrap();
        prop_assert_eq!(a, b);
    }
}

// --- focus of expansion -----------------------------------------------------

proptest! {
    #![proptest_config(cfg())]

    /// Swapping the two flow vectors yields the same canonical SignedFoe.
    #[test]
    fn foe_pair_symmetric((p1, f1, p2, f2) in finite_pair()) {
        let a = foe_from_pair(p1, f1, p2, f2, 0.0);
        let b = foe_from_pair(p2, f2, p1, f1, 0.0);
        match (a, b) {
            (Ok(fa), Ok(fb)) => assert_foe_close(&fa, &fb, 1e-9),
            (Err(_), Err(_)) => {}
            (x, y) => prop_assert!(false, "asymmetric outcome: {x:?} vs {y:?}"),
        }
    }

    /// Scaling either flow by k > 0 changes nothing.
    #[test]
    fn foe_scale_invariant((p1, f1, p2, f2) in finite_pair(), k in 0.01f64..100.0) {
        let a = foe_from_pair(p1, f1, p2, f2, 0.0);
        let b = foe_from_pair(p1, (f1.0 * k, f1.1 * k), p2, f2, 0.0);
        match (a, b) {
            (Ok(fa), Ok(fb)) => {
                assert_foe_close(&fa, &fb, 1e-6);
                // Deviation is also scale-invariant.
                let q = (p1.0 + 3.0, p1.1 - 2.0);
                let f = (1.0, 2.0);
                if let (Ok(da), Ok(db)) = (
                    angular_deviation(&fa, q, f),
                    angular_deviation(&fb, q, (f.0 * k, f.1 * k)),
                ) {
                    prop_assert!((da - db).abs() < 1e-6);
                }
            }
            (Err(_), Err(_)) => {}
            (x, y) => prop_assert!(false, "scale changed outcome: {x:?} vs {y:?}"),
        }
    }

    /// expected_direction is a unit vector wherever defined.
    #[test]
    fn expected_direction_is_unit((p1, f1, p2, f2) in finite_pair(), qx in -60.0f64..60.0, qy in -60.0f64..60.0) {
        if let Ok(foe) = foe_from_pair(p1, f1, p2, f2, 0.0) {
            if let Ok((dx, dy)) = expected_direction(&foe, (qx, qy)) {
                prop_assert!((dx.hypot(dy) - 1.0).abs() < 1e-12);
            }
        }
    }

    /// Exact radial expansion: every qualifying pixel supports the center.
    #[test]
    fn radial_field_full_support(
        w in 3usize..8, h in 3usize..8,
        cx in 0.2f64..6.0, cy in 0.2f64..6.0,
        k in 0.1f32..5.0,
        seed in any::<u64>(),
    ) {
        // Keep the center off the pixel grid so every magnitude is positive.
        let c = (cx + 0.37, cy + 0.41);
        let mut flow = FlowField::zeros(w, h);
        for idx in 0..flow.len() {
            let (x, y) = flow.position(idx);
            flow.set(idx, k * (x - c.0) as f32, k * (y - c.1) as f32);
        }
        let all = BinaryMask::from_vec(w, h, vec![true; w * h]);
        let params = RansacParams { iterations: 48, min_mag: 0.0, seed, ..Default::default() };
        let res = ransac_foe(&flow, &all, &params).unwrap();
        prop_assert_eq!(res.foe.sign(), FoeSign::Source);
        prop_assert_eq!(res.support, w * h);
        // Position accuracy under f32 quantization is bounded by hypothesis
        // conditioning; full support pins it near the true center.
        let (ex, ey) = res.foe.position().unwrap();
        prop_assert!((ex - c.0).abs() < 0.5 && (ey - c.1).abs() < 0.5, "({ex},{ey}) vs {c:?}");
    }

    /// Exhaustive RANSAC matches independent brute-force enumeration on
    /// instances of at most 12 qualifying vectors.
    #[test]
    fn ransac_matches_brute_force(
        w in 2usize..5, h in 2usize..4,
        angles in prop::collection::vec(0.0f64..std::f64::consts::TAU, 12),
        mags in prop::collection::vec(0.6f64..5.0, 12),
    ) {
        let n = w * h;
        let mut flow = FlowField::zeros(w, h);
        for idx in 0..n {
            flow.set(idx, (mags[idx] * angles[idx].cos()) as f32, (mags[idx] * angles[idx].sin()) as f32);
        }
        let params = RansacParams { exhaustive: true, ..Default::default() };

        // Independent enumeration: every unordered pair, counting pixels
        // whose deviation clears the threshold (at-FoE counts as inlier).
        let mut best: Option<usize> = None;
        for i in 0..n {
            for j in i + 1..n {
                let foe = match foe_from_pair(
                    flow.position(i), flow.vector(i),
                    flow.position(j), flow.vector(j),
                    params.min_mag,
                ) {
                    Ok(f) => f,
                    Err(_) => continue,
                };
                let support = (0..n).filter(|&q| {
                    match angular_deviation(&foe, flow.position(q), flow.vector(q)) {
                        Ok(d) => d < params.theta_inlier,
                        Err(Error::AtFoe) => true,
                        Err(_) => false,
                    }
                }).count();
                best = Some(best.map_or(support, |b: usize| b.max(support)));
            }
        }

        let all = BinaryMask::from_vec(w, h, vec![true; n]);
        match (best, ransac_foe(&flow, &all, &params)) {
            (Some(expected), Ok(res)) => prop_assert_eq!(res.support, expected),
            (None, Err(Error::NoConsensus)) => {}
            (oracle, got) => prop_assert!(false, "oracle {oracle:?} vs {got:?}"),
        }
    }

    /// Same inputs + seed => identical result.
    #[test]
    fn ransac_deterministic(field in arb_flow_field(), seed in any::<u64>()) {
        let all = BinaryMask::from_vec(field.width(), field.height(), vec![true; field.len()]);
        let params = RansacParams { iterations: 32, seed, ..Default::default() };
        let a = ransac_foe(&field, &all, &params);
        let b = ransac_foe(&field, &all, &params);
        match (a, b) {
            (Ok(ra), Ok(rb)) => {
                prop_assert_eq!(ra.foe.homogeneous(), rb.foe.homogeneous());
                prop_assert_eq!(ra.foe.sign(), rb.foe.sign());
                prop_assert_eq!(ra.support, rb.support);
                prop_assert_eq!(ra.inlier, rb.inlier);
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "nondeterministic outcome"),
        }
    }
}

// --- moving probability -----------------------------------------------------

proptest! {
    #![proptest_config(cfg())]

    /// All likelihood quantities stay in [0, 1]; P_a and P_FoE are monotone.
    #[test]
    fn likelihood_bounds_and_monotonicity(
        d_a1 in 0.0f64..std::f64::consts::PI,
        d_a2 in 0.0f64..std::f64::consts::PI,
        theta in 0.01f64..3.0,
        p_a in 0.0f64..=1.0,
        f_l1 in 0.0f64..6.0,
        f_l2 in 0.0f64..6.0,
        alpha in 0.0f64..2.0,
    ) {
        let pa1 = angle_probability(d_a1, theta);
        let pa2 = angle_probability(d_a2, theta);
        prop_assert!((0.0..=1.0).contains(&pa1));
        if d_a1 <= d_a2 {
            prop_assert!(pa1 <= pa2);
        }
        let pf1 = foe_likelihood(p_a, f_l1, alpha);
        let pf2 = foe_likelihood(p_a, f_l2, alpha);
        prop_assert!((0.0..=1.0).contains(&pf1));
        if f_l1 <= f_l2 {
            prop_assert!(pf1 <= pf2);
        }
        prop_assert!(foe_likelihood(pa1, f_l1, alpha) >= foe_likelihood(pa1.min(pa2), f_l1, alpha) - 1e-15);
    }

    /// F_l(d_l) = F_l(1/d_l) within the representable band.
    #[test]
    fn length_factor_log_symmetry(d_l in 1e-3f64..1e3) {
        let a = length_factor(d_l, 4.0);
        let b = length_factor(1.0 / d_l, 4.0);
        prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    /// Posterior is bounded by both factors.
    #[test]
    fn posterior_bounded_by_factors(
        prior in prop::collection::vec(0.0f64..=1.0, 12),
        lik in prop::collection::vec(0.0f64..=1.0, 12),
    ) {
        let p = ProbabilityMap::from_fn(4, 3, |x, y| prior[y * 4 + x]);
        let l = ProbabilityMap::from_fn(4, 3, |x, y| lik[y * 4 + x]);
        let post = posterior_map(&p, &l).unwrap();
        for idx in 0..12 {
            prop_assert!(post.get(idx) <= p.get(idx) + 1e-15);
            prop_assert!(post.get(idx) <= l.get(idx) + 1e-15);
            prop_assert!((0.0..=1.0).contains(&post.get(idx)));
        }
    }

    /// Scaling all flow by a power of two leaves d_a, d_l, and the
    /// moving-camera likelihood unchanged (no pixel crosses a magnitude
    /// threshold: everything stays well above min_mag).
    #[test]
    fn likelihood_flow_scale_covariant(
        angles in prop::collection::vec(0.0f64..std::f64::consts::TAU, 12),
        mags in prop::collection::vec(1.0f64..10.0, 12),
        k_pow in 0u32..4,
    ) {
        let k = (1u32 << k_pow) as f32; // exact f32 scaling
        let build = |scale: f32| {
            let mut f = FlowField::zeros(4, 3);
            for idx in 0..12 {
                f.set(idx, scale * (mags[idx] * angles[idx].cos()) as f32,
                            scale * (mags[idx] * angles[idx].sin()) as f32);
            }
            f
        };
        let base = build(1.0);
        let scaled = build(k);
        let all = BinaryMask::from_vec(4, 3, vec![true; 12]);
        let foe = SignedFoe::finite(-20.0, -10.0, FoeSign::Source);
        let params = LikelihoodParams::default();
        let a = likelihood_map(&base, &foe, &all, &params).unwrap();
        let b = likelihood_map(&scaled, &foe, &all, &params).unwrap();
        for idx in 0..12 {
            prop_assert!((a.get(idx) - b.get(idx)).abs() < 1e-9);
        }
        // d_l itself: mean scales with the field.
        let d = relative_length(mags[0] * f64::from(k), mags[1] * f64::from(k), 1e-3).unwrap();
        let d0 = relative_length(mags[0], mags[1], 1e-3).unwrap();
        prop_assert!((d - d0).abs() < 1e-9);
    }
}

// --- object refinement -------------------------------------------------------

fn arb_instance_scene() -> impl Strategy<Value = (BinaryMask, PanopticMap)> {
    (1usize..6, 1usize..6).prop_flat_map(|(w, h)| {
        (
            prop::collection::vec(any::<bool>(), w * h),
            prop::collection::vec(0u16..4, w * h),
            Just(w),
            Just(h),
        )
            .prop_map(|(bits, instances, w, h)| {
                let mask = BinaryMask::from_vec(w, h, bits);
                let seg = PanopticMap::new(w, h, vec![3; w * h], instances);
                (mask, seg)
            })
    })
}

proptest! {
    #![proptest_config(cfg())]

    /// The refined mask is constant within every instance.
    #[test]
    fn object_mask_constant_per_instance((pixels, seg) in arb_instance_scene(), tau in 0.0f64..0.99) {
        let out = object_mask(&pixels, &seg, tau).unwrap();
        let mut per_instance: std::collections::HashMap<u16, bool> = Default::default();
        for idx in 0..out.len() {
            let inst = seg.instance(idx);
            if inst > 0 {
                let v = out.get(idx);
                let prev = per_instance.insert(inst, v);
                if let Some(p) = prev {
                    prop_assert_eq!(p, v);
                }
            }
        }
    }

    /// Raising tau_obj never creates a moving instance; stuff is untouched.
    #[test]
    fn object_mask_monotone_in_tau((pixels, seg) in arb_instance_scene(), t1 in 0.0f64..0.5, dt in 0.0f64..0.4) {
        let lo = object_mask(&pixels, &seg, t1).unwrap();
        let hi = object_mask(&pixels, &seg, t1 + dt).unwrap();
        for idx in 0..lo.len() {
            if hi.get(idx) {
                prop_assert!(lo.get(idx));
            }
            if seg.instance(idx) == 0 {
                prop_assert_eq!(lo.get(idx), pixels.get(idx));
            }
        }
    }

    /// Refinement is idempotent for tau_obj < 1.
    #[test]
    fn object_mask_idempotent((pixels, seg) in arb_instance_scene(), tau in 0.0f64..0.99) {
        let once = object_mask(&pixels, &seg, tau).unwrap();
        let twice = object_mask(&once, &seg, tau).unwrap();
        prop_assert_eq!(once, twice);
    }
}

// --- synthetic scenes ---------------------------------------------------------

fn arb_intrinsics() -> impl Strategy<Value = CameraIntrinsics> {
    (20.0f64..80.0, 20.0f64..80.0).prop_map(|(fx, fy)| CameraIntrinsics {
        fx,
        fy,
        cx: 8.0,
        cy: 6.0,
        width: 16,
        height: 12,
        zoom_rate: 1.0,
    })
}

fn empty_spec(depth: f64) -> SceneSpec {
    SceneSpec {
        background: Background::Plane { depth },
        background_class: 151,
        objects: vec![],
        holes: vec![],
    }
}

proptest! {
    #![proptest_config(cfg())]

    /// Pure translation: every rendered flow line passes through the
    /// ground-truth FoE (deviation < 1e-6 rad), sign included.
    #[test]
    fn rendered_field_consistent_with_gt_foe(
        intr in arb_intrinsics(),
        tx in -0.3f64..0.3, ty in -0.3f64..0.3, tz in -0.3f64..0.3,
        depth in 4.0f64..20.0,
    ) {
        prop_assume!(tx != 0.0 || ty != 0.0 || tz != 0.0);
        let motion = CameraMotion { translation: [tx, ty, tz], rotation: [0.0; 3] };
        let foe = ground_truth_foe(&intr, &motion).unwrap();
        let frame = render_flow(&empty_spec(depth), &intr, &motion).unwrap();
        for idx in 0..frame.flow.len() {
            if frame.flow.magnitude(idx) > 1e-7 {
                let d = angular_deviation(&foe, frame.flow.position(idx), frame.flow.vector(idx)).unwrap();
                prop_assert!(d < 1e-6, "deviation {d}");
            }
        }
    }

    /// Zoom-only scenes expand or contract about the principal point.
    #[test]
    fn zoom_field_consistent_with_gt_foe(mut intr in arb_intrinsics(), zoom in 0.95f64..1.05, depth in 4.0f64..20.0) {
        prop_assume!((zoom - 1.0).abs() > 1e-4);
        intr.zoom_rate = zoom;
        let motion = CameraMotion::default();
        let foe = ground_truth_foe(&intr, &motion).unwrap();
        prop_assert_eq!(foe.position().unwrap(), (intr.cx, intr.cy));
        let frame = render_flow(&empty_spec(depth), &intr, &motion).unwrap();
        for idx in 0..frame.flow.len() {
            if frame.flow.magnitude(idx) > 1e-7 {
                let d = angular_deviation(&foe, frame.flow.position(idx), frame.flow.vector(idx)).unwrap();
                prop_assert!(d < 1e-6);
            }
        }
    }

    /// Negating the translation flips the FoE sign and reverses the flow to
    /// first order.
    #[test]
    fn reversibility_first_order(
        intr in arb_intrinsics(),
        dir in prop::collection::vec(-1.0f64..1.0, 3),
        depth in 5.0f64..20.0,
        scale in 0.1f64..1.0,
    ) {
        let norm = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
        prop_assume!(norm > 1e-3 && dir[2].abs() > 1e-3 * norm);
        // |t| <= 5e-5 * depth: comfortably inside the first-order regime.
        let t_mag = 5e-5 * depth * scale;
        let t = [dir[0] / norm * t_mag, dir[1] / norm * t_mag, dir[2] / norm * t_mag];
        let fwd = CameraMotion { translation: t, rotation: [0.0; 3] };
        let bwd = CameraMotion { translation: [-t[0], -t[1], -t[2]], rotation: [0.0; 3] };

        let foe_f = ground_truth_foe(&intr, &fwd).unwrap();
        let foe_b = ground_truth_foe(&intr, &bwd).unwrap();
        prop_assert_ne!(foe_f.sign(), foe_b.sign());

        let a = render_flow(&empty_spec(depth), &intr, &fwd).unwrap();
        let b = render_flow(&empty_spec(depth), &intr, &bwd).unwrap();
        for idx in 0..a.flow.len() {
            let (ua, va) = a.flow.vector(idx);
            let (ub, vb) = b.flow.vector(idx);
            prop_assert!((ua + ub).abs() < 1e-6, "residual {}", ua + ub);
            prop_assert!((va + vb).abs() < 1e-6);
        }
    }
}

// --- evaluation ------------------------------------------------------------------

proptest! {
    #![proptest_config(cfg())]

    /// IoU is symmetric, bounded, and invariant under a joint permutation.
    #[test]
    fn iou_symmetric_and_permutation_invariant(
        a in prop::collection::vec(any::<bool>(), 24),
        b in prop::collection::vec(any::<bool>(), 24),
        seed in any::<u64>(),
    ) {
        let ma = BinaryMask::from_vec(6, 4, a.clone());
        let mb = BinaryMask::from_vec(6, 4, b.clone());
        let ab = frame_iou(&ma, &mb).unwrap();
        let ba = frame_iou(&mb, &ma).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert!((0.0..=1.0).contains(&ab));

        let mut order: Vec<usize> = (0..24).collect();
        let mut state = seed;
        for i in (1..24).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            order.swap(i, j);
        }
        let pa: Vec<bool> = order.iter().map(|&i| a[i]).collect();
        let pb: Vec<bool> = order.iter().map(|&i| b[i]).collect();
        let pma = BinaryMask::from_vec(6, 4, pa);
        let pmb = BinaryMask::from_vec(6, 4, pb);
        prop_assert_eq!(frame_iou(&pma, &pmb).unwrap(), ab);
    }
}
