use perc_lab::engine::PercolationParams;
use perc_lab::sequence::{ExponentSpec, ProbSequence};
use proptest::prelude::*;

pub fn catalog_seq() -> impl Strategy<Value = ProbSequence> {
    prop_oneof![
        (0.05f64..1.0).prop_map(|p| ProbSequence::mfp(p).unwrap()),
        (0.05f64..1.0, 1.0f64..4.0).prop_map(|(p, a)| ProbSequence::table1_family1(p, a).unwrap()),
        (0.05f64..1.0, 0.05f64..0.95).prop_map(|(p, a)| ProbSequence::table1_family2(p, a).unwrap()),
        (0.05f64..1.0).prop_map(|p| ProbSequence::example1(p, ExponentSpec::ConstantOne).unwrap()),
        (0.05f64..1.0, prop::collection::vec(0.2f64..3.0, 0..6), 0.2f64..3.0).prop_map(|(p, mut v, t)| {
            v.push(t);
            v.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let tail = v.pop().unwrap();
            ProbSequence::example1(p, ExponentSpec::ExplicitList { values: v, tail }).unwrap()
        }),
        (0.05f64..1.0, 0.05f64..0.95)
            .prop_map(|(p, a)| ProbSequence::example1(p, ExponentSpec::GeometricGap { a }).unwrap()),
    ]
}

pub fn small_params() -> impl Strategy<Value = PercolationParams> {
    (1u32..=2, 2u32..=3, 1u32..=6, 0.3f64..1.0, 0.0f64..0.6, any::<u64>()).prop_map(|(n, m, depth, p, lift, seed)| {
        // p_k climbs from p towards 1.
        let prefix: Vec<f64> = (0..depth).map(|k| p + (1.0 - p) * lift * k as f64 / depth as f64).collect();
        let seq = ProbSequence::explicit(prefix, None).unwrap();
        PercolationParams::new(n, m, depth, seq, seed)
    })
}
