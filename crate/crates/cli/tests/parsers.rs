//! Parsers accept arbitrary text without panicking, and accept what they
//! print.

use meson_eff_cli::{
    parse_angle, parse_basis, parse_config, parse_observable, parse_policy, parse_quasispin, Figure,
    SystemPreset, TimeUnit,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn never_panic(s in "\\PC{0,40}") {
        let _ = parse_angle(&s);
        let _ = parse_observable(&s);
        let _ = parse_quasispin(&s);
        let _ = parse_policy(&s);
        let _ = parse_basis(&s);
        let _ = s.parse::<Figure>();
        let _ = s.parse::<SystemPreset>();
        let _ = s.parse::<TimeUnit>();
        if let Ok(layer) = parse_config(&s) {
            let _ = layer.resolve();
        }
    }

    #[test]
    fn structured_text_never_panics(
        a in "(-?[0-9]{0,3}(\\.[0-9]{0,3})?)?\\*?(pi|PI)?(/[0-9]{0,2})?",
        b in "[-0-9.e]{0,8}",
        t in "[-0-9.e]{0,8}",
    ) {
        let _ = parse_observable(&format!("{a},{b},{t}"));
        let _ = parse_quasispin(&format!("{a},{b}"));
    }

    #[test]
    fn config_fields_never_panic(
        gs in proptest::num::f64::ANY,
        gl in proptest::num::f64::ANY,
        steps in any::<u64>(),
        t0 in -10.0..10.0f64,
    ) {
        let text = format!(
            r#"{{"system": {{"gamma_s": {gs:?}, "gamma_l": {gl:?}, "delta": 0}}, "grid": {{"t_min": {t0}, "steps": {steps}}}}}"#
        );
        if let Ok(layer) = parse_config(&text) {
            let _ = layer.resolve();
        }
    }

    #[test]
    fn observable_round_trip(alpha in 0.0..=std::f64::consts::PI, phi in 0.0..6.28f64, t in 0.0..100.0f64) {
        let o = parse_observable(&format!("{alpha},{phi},{t}")).unwrap();
        prop_assert_eq!(o.quasispin.alpha(), alpha);
        prop_assert_eq!(o.t, t);
    }
}

#[test]
fn tags_round_trip() {
    for f in Figure::ALL {
        assert_eq!(f.as_str().parse::<Figure>().unwrap(), f);
    }
    for s in [SystemPreset::Kaon, SystemPreset::BMeson, SystemPreset::Stable, SystemPreset::EqualWidth] {
        assert_eq!(s.as_str().parse::<SystemPreset>().unwrap(), s);
    }
    for u in [TimeUnit::Dm, TimeUnit::TauS] {
        assert_eq!(u.as_str().parse::<TimeUnit>().unwrap(), u);
    }
}
