use std::sync::OnceLock;

use levelcert::checks::{Certificate, CheckRegistry, RunConfig};
use levelcert::frames::{build_frame, Frame, FrameView, StandardFrame};
use levelcert::ideals::EpPoint;
use levelcert::levelgraphs::{t_level, t_member};
use levelcert::words::{
    least_sn_extension, pair, phi, phi_inv, psi, psi_inv, sn, unpair, PairCode, Word,
};
use proptest::prelude::*;

fn word(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(any::<bool>(), 0..=max).prop_map(Word::from_bits)
}

fn ep_point() -> impl Strategy<Value = EpPoint> {
    (word(8), word(5).prop_filter("nonempty", |w| !w.is_empty()))
        .prop_map(|(a, b)| EpPoint::new(a, b).unwrap())
}

const EXPLICIT_DEPTH: u64 = 20_000;

fn explicit() -> &'static Frame {
    static FRAME: OnceLock<Frame> = OnceLock::new();
    FRAME.get_or_init(|| build_frame(EXPLICIT_DEPTH).unwrap())
}

proptest! {
    #[test]
    fn pair_round_trip(n in 0u64..1 << 31, p in 0u64..1 << 31) {
        let c = pair(n, p).unwrap();
        prop_assert_eq!(unpair(c), (n, p));
        prop_assert_eq!(c.0, (n + p) * (n + p + 1) / 2 + p);
    }

    #[test]
    fn phi_round_trip(n in 0u64..1 << 12, p in 0u64..1 << 12) {
        prop_assert_eq!(phi_inv(phi(n, p).unwrap()), (n, p));
    }

    #[test]
    fn unpair_is_onto(q in 0u64..1 << 50) {
        let (a, b) = unpair(PairCode(q));
        prop_assert_eq!(pair(a, b).unwrap().0, q);
    }

    #[test]
    fn psi_round_trip(n in 0u64..1 << 40) {
        let s = psi(n);
        // length ⌊log₂(n+1)⌋
        prop_assert_eq!(s.len() as u32, 63 - (n + 1).leading_zeros());
        prop_assert_eq!(psi_inv(&s).unwrap(), n);
    }

    #[test]
    fn least_sn_extension_matches_scan(p in word(6), lo in 0u64..300) {
        let scanned = (lo..).find(|&d| p.is_prefix_of(&sn(d))).unwrap();
        prop_assert_eq!(least_sn_extension(&p, lo), Some(scanned));
    }

    #[test]
    fn closed_form_extension_matches_scan(
        q in 0u64..6,
        w in word(4),
        min_len in 0u64..200,
        p in 0u64..5,
    ) {
        let scan = explicit().find_extension(q, &w, min_len, p);
        let closed = StandardFrame::unbounded().find_extension(q, &w, min_len, p);
        match scan {
            Ok(len) => prop_assert_eq!(closed.unwrap(), len),
            Err(_) => prop_assert!(closed.unwrap() > EXPLICIT_DEPTH),
        }
    }

    #[test]
    fn word_xor_and_concat(a in word(40), b in word(40)) {
        let n = a.len().min(b.len());
        let (a, b) = (a.prefix(n), b.prefix(n));
        prop_assert_eq!(a.xor(&b).xor(&b), a.clone());
        prop_assert_eq!(a.xor(&b), b.xor(&a));
        let ab = a.concat(&b);
        prop_assert_eq!(ab.prefix(n), a.clone());
        prop_assert_eq!(ab.suffix_from(n), b.clone());
        prop_assert!(a.is_prefix_of(&ab) && a.compatible(&ab));
    }

    #[test]
    fn ep_xor_is_pointwise(x in ep_point(), y in ep_point(), z in ep_point()) {
        let xy = x.xor(&y);
        for q in 0..120 {
            prop_assert_eq!(xy.eval(q), x.eval(q) != y.eval(q));
        }
        prop_assert_eq!(xy.xor(&z), x.xor(&y.xor(&z)));
        prop_assert_eq!(x.xor(&x), EpPoint::zero());
        prop_assert_eq!(xy.xor(&y), x);
    }

    #[test]
    fn ep_max_bounds_its_inputs(x in ep_point(), y in ep_point()) {
        let m = EpPoint::max(&[x.clone(), y.clone()]).unwrap();
        prop_assert!(x.le(&m) && y.le(&m));
        for q in 0..120 {
            prop_assert_eq!(m.eval(q), x.eval(q) || y.eval(q));
        }
    }

    #[test]
    fn ep_representation_is_canonical(a in word(6), b in word(4).prop_filter("nonempty", |w| !w.is_empty())) {
        // the same point written with a longer prefix and a doubled period
        let x = EpPoint::new(a.clone(), b.clone()).unwrap();
        let y = EpPoint::new(a.concat(&b), b.concat(&b)).unwrap();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn t_member_agrees_with_level(l in 1u32..9, s in any::<u64>(), t in any::<u64>()) {
        let level = t_level(l).unwrap();
        let (s, t) = (Word::from_index(s % (1 << l), l as usize), Word::from_index(t % (1 << l), l as usize));
        prop_assert_eq!(level.contains(&s, &t), t_member(&s, &t));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn certificate_round_trips(seed in any::<u64>(), depth in 1u32..4) {
        let reg = CheckRegistry::standard();
        let cert = reg.run("words.pair-successor", &RunConfig::new(depth, seed)).unwrap();
        let back: Certificate = serde_json::from_str(&cert.to_json()).unwrap();
        prop_assert_eq!(&back, &cert);
        prop_assert!(cert.passed());
    }
}
