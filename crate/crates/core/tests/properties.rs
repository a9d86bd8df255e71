use nvmsim_core::aging::{
    piecewise_aging, AgingParams, BlockAging, RecoveryPolicy, VoltageSegment,
};
use nvmsim_core::controller::FixedPoint;
use nvmsim_core::workload::{parse_trace, write_trace, OpKind, TraceRecord};
use proptest::prelude::*;

fn segment() -> impl Strategy<Value = VoltageSegment> {
    (0.0f64..1e6, 0.05f64..3.0).prop_map(|(d, v)| VoltageSegment::new(d, v))
}

proptest! {
    #[test]
    fn aging_sum_is_order_independent(
        segs in prop::collection::vec(segment(), 1..=10),
        seed in any::<u64>(),
    ) {
        let p = AgingParams::default();
        let reference = piecewise_aging(&segs, &p).unwrap();
        let mut shuffled = segs.clone();
        // Fisher-Yates with a tiny LCG to stay inside the strategy seed.
        let mut s = seed | 1;
        for i in (1..shuffled.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (s >> 33) as usize % (i + 1));
        }
        let got = piecewise_aging(&shuffled, &p).unwrap();
        prop_assert!(((got - reference) / reference).abs() <= 1e-12);
    }

    #[test]
    fn accrual_is_independent_of_chunking(
        deltas in prop::collection::vec(0.0f64..400.0, 1..40),
        kappa in 0.0f64..1.0,
        cap in 1.0f64..2000.0,
    ) {
        let pol = RecoveryPolicy::new(kappa, cap).unwrap();
        let mut split = BlockAging::default();
        for d in &deltas {
            split.accrue(*d, &pol);
        }
        let mut whole = BlockAging::default();
        whole.accrue(deltas.iter().sum(), &pol);
        prop_assert!((split.total() - whole.total()).abs() <= 1e-9 * whole.total().max(1.0));
        prop_assert!((split.permanent - whole.permanent).abs() <= 1e-9 * whole.total().max(1.0));
        prop_assert!(split.recoverable <= cap + 1e-9);
    }

    #[test]
    fn fixed_point_error_bound(x in 1e-30f64..1e30) {
        let q = FixedPoint::quantize(x).value();
        prop_assert!(((q - x) / x).abs() <= 2f64.powi(-20));
    }

    #[test]
    fn trace_text_round_trip(
        gaps in prop::collection::vec((0u64..1000, any::<bool>(), any::<u64>()), 0..200),
    ) {
        let mut cycle = 0;
        let recs: Vec<_> = gaps
            .into_iter()
            .map(|(g, w, a)| {
                cycle += g;
                TraceRecord::new(cycle, if w { OpKind::Write } else { OpKind::Read }, a)
            })
            .collect();
        let mut buf = Vec::new();
        write_trace(&mut buf, &recs).unwrap();
        prop_assert_eq!(parse_trace(buf.as_slice()).unwrap(), recs);
    }
}

#[test]
fn million_line_trace_round_trip() {
    let recs: Vec<_> = (0..1_000_000u64)
        .map(|i| {
            let kind = if i % 3 == 0 {
                OpKind::Write
            } else {
                OpKind::Read
            };
            TraceRecord::new(i / 2, kind, i.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 8)
        })
        .collect();
    let mut buf = Vec::new();
    write_trace(&mut buf, &recs).unwrap();
    assert_eq!(parse_trace(buf.as_slice()).unwrap(), recs);
}
