//! Scalar distributions: the standard normal (cdf, density, quantile) and
//! samplers for normal, Student-t, chi-square and uniform draws.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use libm::erfc;

use crate::error::{Error, Result};
use crate::rng::SeededRng;

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Inverse of the standard normal cdf.
///
/// Wichura's AS241 (PPND16) rational approximation followed by one Newton
/// step against [`normal_cdf`].
pub fn normal_quantile(prob: f64) -> Result<f64> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::Domain(format!(
            "normal quantile needs a probability in (0,1), got {prob}"
        )));
    }
    let z = ppnd16(prob);
    // Newton refinement is skipped deep in the tails where the density underflows.
    let density = normal_pdf(z);
    if density > 1e-300 {
        Ok(z - (normal_cdf(z) - prob) / density)
    } else {
        Ok(z)
    }
}

fn ppnd16(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = (((((((2.509_080_928_730_122_7e3 * r + 3.343_057_558_358_813e4) * r
            + 6.726_577_092_700_87e4)
            * r
            + 4.592_195_393_154_987e4)
            * r
            + 1.373_169_376_550_946e4)
            * r
            + 1.971_590_950_306_551_3e3)
            * r
            + 1.331_416_678_917_843_8e2)
            * r
            + 3.387_132_872_796_366_5)
            * q;
        let den = ((((((5.226_495_278_852_545e3 * r + 2.872_908_573_572_194_3e4) * r
            + 3.930_789_580_009_271e4)
            * r
            + 2.121_379_430_158_659_7e4)
            * r
            + 5.394_196_021_424_751e3)
            * r
            + 6.871_870_074_920_579e2)
            * r
            + 4.231_333_070_160_091e1)
            * r
            + 1.0;
        return num / den;
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let value = if r <= 5.0 {
        r -= 1.6;
        let num = ((((((7.745_450_142_783_414e-4 * r + 2.272_384_498_926_918_4e-2) * r
            + 2.417_807_251_774_506e-1)
            * r
            + 1.270_458_252_452_368_4)
            * r
            + 3.647_848_324_763_204_5)
            * r
            + 5.769_497_221_460_691)
            * r
            + 4.630_337_846_156_545)
            * r
            + 1.423_437_110_749_683_5;
        let den = ((((((1.050_750_071_644_416_9e-9 * r + 5.475_938_084_995_345e-4) * r
            + 1.519_866_656_361_645_7e-2)
            * r
            + 1.481_039_764_274_800_8e-1)
            * r
            + 6.897_673_349_851e-1)
            * r
            + 1.676_384_830_183_803_8)
            * r
            + 2.053_191_626_637_758_8)
            * r
            + 1.0;
        num / den
    } else {
        r -= 5.0;
        let num = ((((((2.010_334_399_292_288_1e-7 * r + 2.711_555_568_743_487_6e-5) * r
            + 1.242_660_947_388_078_4e-3)
            * r
            + 2.653_218_952_657_612_4e-2)
            * r
            + 2.965_605_718_285_048_7e-1)
            * r
            + 1.784_826_539_917_291_3)
            * r
            + 5.463_784_911_164_114)
            * r
            + 6.657_904_643_501_103;
        let den = ((((((2.044_263_103_389_939_7e-15 * r + 1.421_511_758_316_446e-7) * r
            + 1.846_318_317_510_054_8e-5)
            * r
            + 7.868_691_311_456_133e-4)
            * r
            + 1.487_536_129_085_061_5e-2)
            * r
            + 1.369_298_809_227_358e-1)
            * r
            + 5.998_322_065_558_88e-1)
            * r
            + 1.0;
        num / den
    };
    if q < 0.0 {
        -value
    } else {
        value
    }
}

pub fn sample_normal(rng: &mut SeededRng, count: usize) -> Vec<f64> {
    (0..count).map(|_| StandardNormal.sample(rng)).collect()
}

pub(crate) fn fill_normal(rng: &mut SeededRng, out: &mut [f64]) {
    for v in out {
        *v = StandardNormal.sample(rng);
    }
}

pub fn sample_uniform(rng: &mut SeededRng, count: usize) -> Vec<f64> {
    (0..count).map(|_| rng.gen::<f64>()).collect()
}

/// Chi-square draws with integer degrees of freedom, as sums of squared normals.
pub fn sample_chi_square(rng: &mut SeededRng, dof: u32, count: usize) -> Result<Vec<f64>> {
    if dof == 0 {
        return Err(Error::Domain("chi-square needs dof >= 1".into()));
    }
    Ok((0..count).map(|_| chi_square_draw(rng, dof)).collect())
}

fn chi_square_draw(rng: &mut SeededRng, dof: u32) -> f64 {
    (0..dof)
        .map(|_| {
            let g: f64 = StandardNormal.sample(rng);
            g * g
        })
        .sum()
}

/// Student-t draws `N / sqrt(chi2_dof / dof)`; with `unit_variance` they are
/// rescaled by `sqrt((dof - 2) / dof)`.
pub fn sample_student_t(
    rng: &mut SeededRng,
    dof: u32,
    count: usize,
    unit_variance: bool,
) -> Result<Vec<f64>> {
    if dof < 3 {
        return Err(Error::Domain(format!(
            "student-t sampling needs dof >= 3 for a finite variance, got {dof}"
        )));
    }
    let scale = if unit_variance {
        ((dof as f64 - 2.0) / dof as f64).sqrt()
    } else {
        1.0
    };
    Ok((0..count)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            let chi = chi_square_draw(rng, dof);
            scale * z / (chi / dof as f64).sqrt()
        })
        .collect())
}

/// Variance of a Student-t with `dof > 2` degrees of freedom.
pub fn student_t_variance(dof: u32) -> f64 {
    dof as f64 / (dof as f64 - 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        (m, v)
    }

    #[test]
    fn quantile_of_half_is_zero() {
        assert_abs_diff_eq!(normal_quantile(0.5).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn quantile_rejects_boundary() {
        assert!(normal_quantile(0.0).is_err());
        assert!(normal_quantile(1.0).is_err());
        assert!(normal_quantile(f64::NAN).is_err());
    }

    #[test]
    fn cdf_and_quantile_are_inverse() {
        let mut p = 1e-6;
        while p < 1.0 - 1e-6 {
            let z = normal_quantile(p).unwrap();
            assert_abs_diff_eq!(normal_cdf(z), p, epsilon = 1e-8);
            p += 0.000_731;
        }
    }

    #[test]
    fn normal_moments() {
        let mut rng = SeededRng::new(7);
        assert!(sample_normal(&mut rng, 0).is_empty());
        let xs = sample_normal(&mut SeededRng::new(7), 100_000);
        let (m, v) = mean_var(&xs);
        assert!(m.abs() < 0.02, "mean {m}");
        assert!(v > 0.98 && v < 1.02, "var {v}");
        assert_eq!(xs, sample_normal(&mut SeededRng::new(7), 100_000));
    }

    #[test]
    fn student_t_variances() {
        let xs = sample_student_t(&mut SeededRng::new(1), 5, 1_000_000, true).unwrap();
        let (_, v) = mean_var(&xs);
        assert!(v > 0.99 && v < 1.01, "unit-variance t5 var {v}");
        let xs = sample_student_t(&mut SeededRng::new(2), 4, 1_000_000, false).unwrap();
        let (_, v) = mean_var(&xs);
        assert!(v > 1.96 && v < 2.04, "t4 var {v}");
    }

    #[test]
    fn student_t_needs_three_dof() {
        assert!(sample_student_t(&mut SeededRng::new(1), 2, 10, false).is_err());
    }

    #[test]
    fn chi_square_mean() {
        let xs = sample_chi_square(&mut SeededRng::new(3), 4, 200_000).unwrap();
        let (m, _) = mean_var(&xs);
        assert!((m - 4.0).abs() < 0.05);
    }
}
