//! Error function.
//!
//! Port of the FreeBSD msun `s_erf.c` rational approximations, which carry
//! the notice below. Coefficients are stored by bit pattern so the result is
//! identical on every platform with IEEE-754 doubles.
//!
//! ```text
//! Copyright (C) 1993 by Sun Microsystems, Inc. All rights reserved.
//!
//! Developed at SunPro, a Sun Microsystems, Inc. business.
//! Permission to use, copy, modify, and distribute this
//! software is freely granted, provided that this notice
//! is preserved.
//! ```

const ERX: f64 = f64::from_bits(0x3FEB0AC160000000); // 8.45062911510467529297e-01
const EFX: f64 = f64::from_bits(0x3FC06EBA8214DB69); // 1.28379167095512586316e-01
const EFX8: f64 = f64::from_bits(0x3FF06EBA8214DB69); // 1.02703333676410069053e+00
const PP0: f64 = f64::from_bits(0x3FC06EBA8214DB68); // 1.28379167095512558561e-01
const PP1: f64 = f64::from_bits(0xBFD4CD7D691CB913); // -3.25042107247001499370e-01
const PP2: f64 = f64::from_bits(0xBF9D2A51DBD7194F); // -2.84817495755985104766e-02
const PP3: f64 = f64::from_bits(0xBF77A291236668E4); // -5.77027029648944159157e-03
const PP4: f64 = f64::from_bits(0xBEF8EAD6120016AC); // -2.37630166566501626084e-05
const QQ1: f64 = f64::from_bits(0x3FD97779CDDADC09); // 3.97917223959155352819e-01
const QQ2: f64 = f64::from_bits(0x3FB0A54C5536CEBA); // 6.50222499887672944485e-02
const QQ3: f64 = f64::from_bits(0x3F74D022C4D36B0F); // 5.08130628187576562776e-03
const QQ4: f64 = f64::from_bits(0x3F215DC9221C1A10); // 1.32494738004321644526e-04
const QQ5: f64 = f64::from_bits(0xBED09C4342A26120); // -3.96022827877536812320e-06
const PA0: f64 = f64::from_bits(0xBF6359B8BEF77538); // -2.36211856075265944077e-03
const PA1: f64 = f64::from_bits(0x3FDA8D00AD92B34D); // 4.14856118683748331666e-01
const PA2: f64 = f64::from_bits(0xBFD7D240FBB8C3F1); // -3.72207876035701323847e-01
const PA3: f64 = f64::from_bits(0x3FD45FCA805120E4); // 3.18346619901161753674e-01
const PA4: f64 = f64::from_bits(0xBFBC63983D3E28EC); // -1.10894694282396677476e-01
const PA5: f64 = f64::from_bits(0x3FA22A36599795EB); // 3.54783043256182359371e-02
const PA6: f64 = f64::from_bits(0xBF61BF380A96073F); // -2.16637559486879084300e-03
const QA1: f64 = f64::from_bits(0x3FBB3E6618EEE323); // 1.06420880400844228286e-01
const QA2: f64 = f64::from_bits(0x3FE14AF092EB6F33); // 5.40397917702171048937e-01
const QA3: f64 = f64::from_bits(0x3FB2635CD99FE9A7); // 7.18286544141962662868e-02
const QA4: f64 = f64::from_bits(0x3FC02660E763351F); // 1.26171219808761642112e-01
const QA5: f64 = f64::from_bits(0x3F8BEDC26B51DD1C); // 1.36370839120290507362e-02
const QA6: f64 = f64::from_bits(0x3F888B545735151D); // 1.19844998467991074170e-02
const RA0: f64 = f64::from_bits(0xBF843412600D6435); // -9.86494403484714822705e-03
const RA1: f64 = f64::from_bits(0xBFE63416E4BA7360); // -6.93858572707181764372e-01
const RA2: f64 = f64::from_bits(0xC0251E0441B0E726); // -1.05586262253232909814e+01
const RA3: f64 = f64::from_bits(0xC04F300AE4CBA38D); // -6.23753324503260060396e+01
const RA4: f64 = f64::from_bits(0xC0644CB184282266); // -1.62396669462573470355e+02
const RA5: f64 = f64::from_bits(0xC067135CEBCCABB2); // -1.84605092906711035994e+02
const RA6: f64 = f64::from_bits(0xC054526557E4D2F2); // -8.12874355063065934246e+01
const RA7: f64 = f64::from_bits(0xC023A0EFC69AC25C); // -9.81432934416914548592e+00
const SA1: f64 = f64::from_bits(0x4033A6B9BD707687); // 1.96512716674392571292e+01
const SA2: f64 = f64::from_bits(0x4061350C526AE721); // 1.37657754143519042600e+02
const SA3: f64 = f64::from_bits(0x407B290DD58A1A71); // 4.34565877475229228821e+02
const SA4: f64 = f64::from_bits(0x40842B1921EC2868); // 6.45387271733267880336e+02
const SA5: f64 = f64::from_bits(0x407AD02157700314); // 4.29008140027567833386e+02
const SA6: f64 = f64::from_bits(0x405B28A3EE48AE2C); // 1.08635005541779435134e+02
const SA7: f64 = f64::from_bits(0x401A47EF8E484A93); // 6.57024977031928170135e+00
const SA8: f64 = f64::from_bits(0xBFAEEFF2EE749A62); // -6.04244152148580987438e-02
const RB0: f64 = f64::from_bits(0xBF84341239E86F4A); // -9.86494292470009928597e-03
const RB1: f64 = f64::from_bits(0xBFE993BA70C285DE); // -7.99283237680523006574e-01
const RB2: f64 = f64::from_bits(0xC031C209555F995A); // -1.77579549177547519889e+01
const RB3: f64 = f64::from_bits(0xC064145D43C5ED98); // -1.60636384855821916062e+02
const RB4: f64 = f64::from_bits(0xC083EC881375F228); // -6.37566443368389627722e+02
const RB5: f64 = f64::from_bits(0xC09004616A2E5992); // -1.02509513161107724954e+03
const RB6: f64 = f64::from_bits(0xC07E384E9BDC383F); // -4.83519191608651397019e+02
const SB1: f64 = f64::from_bits(0x403E568B261D5190); // 3.03380607434824582924e+01
const SB2: f64 = f64::from_bits(0x40745CAE221B9F0A); // 3.25792512996573918826e+02
const SB3: f64 = f64::from_bits(0x409802EB189D5118); // 1.53672958608443695994e+03
const SB4: f64 = f64::from_bits(0x40A8FFB7688C246A); // 3.19985821950859553908e+03
const SB5: f64 = f64::from_bits(0x40A3F219CEDF3BE6); // 2.55305040643316442583e+03
const SB6: f64 = f64::from_bits(0x407DA874E79FE763); // 4.74528541206955367215e+02
const SB7: f64 = f64::from_bits(0xC03670E242712D62); // -2.24409524465858183362e+01

/// Error function `erf(x) = 2/sqrt(pi) * int_0^x exp(-t^2) dt`.
///
/// Absolute error below 1e-16 over the whole real line. Returns exactly
/// `±1` for `|x| >= 6`.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let negative = x < 0.0;
    let ax = x.abs();
    let value = if ax < 0.84375 {
        if ax < 3.725_290_298_461_914e-9 {
            // |x| < 2^-28
            if ax < 2.848_094_538_889_218e-306 {
                0.125 * (8.0 * ax + EFX8 * ax)
            } else {
                ax + EFX * ax
            }
        } else {
            let z = ax * ax;
            let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
            let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
            ax + ax * (r / s)
        }
    } else if ax < 1.25 {
        let s = ax - 1.0;
        let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
        let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
        ERX + p / q
    } else if ax >= 6.0 {
        1.0
    } else {
        1.0 - erfc_tail(ax)
    };
    if negative {
        -value
    } else {
        value
    }
}

/// `erfc(ax)` for `1.25 <= ax < 28`.
fn erfc_tail(ax: f64) -> f64 {
    let s = 1.0 / (ax * ax);
    let (r, q) = if ax < 1.0 / 0.35 {
        (
            RA0 + s * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7)))))),
            1.0 + s
                * (SA1
                    + s * (SA2
                        + s * (SA3 + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8))))))),
        )
    } else {
        (
            RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6))))),
            1.0 + s * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7)))))),
        )
    };
    // x truncated to its high word keeps exp(-z*z) exact enough
    let z = f64::from_bits(ax.to_bits() & 0xffff_ffff_0000_0000);
    let e = (-z * z - 0.5625).exp() * ((z - ax) * (z + ax) + r / q).exp();
    e / ax
}

/// Complementary error function `1 - erf(x)`, accurate in relative terms
/// for large positive `x`.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    if ax < 0.84375 {
        return if x < 0.25 {
            1.0 - erf(x)
        } else {
            0.5 + (0.5 - erf(x))
        };
    }
    if ax < 1.25 {
        let s = ax - 1.0;
        let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
        let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
        return if x > 0.0 {
            1.0 - ERX - p / q
        } else {
            1.0 + ERX + p / q
        };
    }
    if x > 0.0 {
        if ax < 28.0 {
            erfc_tail(ax)
        } else {
            0.0
        }
    } else if ax < 6.0 {
        2.0 - erfc_tail(ax)
    } else {
        2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Maclaurin series with compensated summation, accurate for |x| <= 3.
    fn erf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        let mut comp = 0.0;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= -x * x / n;
            let add = term / (2.0 * n + 1.0);
            let y = add - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            if add.abs() < 1e-30 {
                break;
            }
        }
        sum * std::f64::consts::FRAC_2_SQRT_PI
    }

    #[test]
    fn zero_and_one() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(1.0) - 0.842_700_792_9).abs() < 1e-10);
        assert!((erf(1.0) - erf_series(1.0)).abs() < 1e-15);
    }

    #[test]
    fn matches_series_on_core_range() {
        for i in 0..=300 {
            let x = -1.5 + 3.0 * (i as f64) / 300.0;
            let err = (erf(x) - erf_series(x)).abs();
            assert!(err < 1e-15, "x = {x}: err {err}");
        }
    }

    #[test]
    fn odd_and_bounded() {
        for i in 0..1000 {
            let x = -7.0 + 14.0 * (i as f64) / 999.0;
            assert_eq!(erf(x), -erf(-x));
            assert!(erf(x).abs() <= 1.0);
        }
        assert_eq!(erf(f64::INFINITY), 1.0);
        assert_eq!(erf(f64::NEG_INFINITY), -1.0);
        assert!(erf(f64::NAN).is_nan());
    }

    #[test]
    fn tail_values() {
        // erfc(2) = 4.677734981047266e-3, erfc(3) = 2.209049699858544e-5
        assert!((1.0 - erf(2.0) - 4.677_734_981_047_266e-3).abs() < 4e-16);
        assert!((1.0 - erf(3.0) - 2.209_049_699_858_544e-5).abs() < 4e-16);
    }

    #[test]
    fn complement_in_the_tail() {
        // reference values of erfc at 5 and 10
        assert!((erfc(5.0) / 1.537_459_794_428_034_8e-12 - 1.0).abs() < 1e-14);
        assert!((erfc(10.0) / 2.088_487_583_762_545e-45 - 1.0).abs() < 1e-14);
        for i in -400..400 {
            let x = i as f64 * 0.01;
            assert!((erfc(x) - (1.0 - erf(x))).abs() < 4e-16, "x = {x}");
        }
        assert_eq!(erfc(30.0), 0.0);
        assert_eq!(erfc(-7.0), 2.0);
    }
}
