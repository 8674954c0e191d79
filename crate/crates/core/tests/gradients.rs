//! Central finite differences against the symbolic gradients.

use perfci::{MeasureSpec, MomentTriple};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn measures() -> Vec<MeasureSpec> {
    vec![
        MeasureSpec::accuracy(),
        MeasureSpec::f_beta(0.5).unwrap(),
        MeasureSpec::f1(),
        MeasureSpec::f_beta(2.0).unwrap(),
        MeasureSpec::jaccard(),
        MeasureSpec::tversky(0.3, 0.4).unwrap(),
        MeasureSpec::tversky(0.5, 0.5).unwrap(),
        MeasureSpec::correlation(),
        MeasureSpec::cosine(),
        MeasureSpec::lift(),
        MeasureSpec::overlap(),
    ]
}

/// Interior triple with some slack from the Fréchet bounds and from a = z.
fn interior<R: Rng>(rng: &mut R) -> MomentTriple {
    loop {
        let a: f64 = rng.random_range(0.1..0.9);
        let z = rng.random_range(0.1..0.9);
        if (a - z).abs() < 0.05 {
            continue;
        }
        let lo = (a + z - 1.0f64).max(0.0) + 0.02;
        let hi = a.min(z) - 0.02;
        if lo >= hi {
            continue;
        }
        let za = rng.random_range(lo..hi);
        return MomentTriple::new(za, a, z).unwrap();
    }
}

fn eval(m: &MeasureSpec, t: [f64; 3]) -> f64 {
    m.evaluate(&MomentTriple {
        za: t[0],
        a: t[1],
        z: t[2],
    })
    .unwrap()
}

#[test]
fn central_differences_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let h = 1e-6;
    for measure in measures() {
        for _ in 0..25 {
            let m = interior(&mut rng);
            let g = measure.gradient(&m).unwrap().as_array();
            let base = [m.za, m.a, m.z];
            let fd: Vec<f64> = (0..3)
                .map(|c| {
                    let (mut up, mut down) = (base, base);
                    up[c] += h;
                    down[c] -= h;
                    (eval(&measure, up) - eval(&measure, down)) / (2.0 * h)
                })
                .collect();
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            let err = g
                .iter()
                .zip(&fd)
                .map(|(x, y)| (x - y).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(
                err / norm < 1e-5,
                "{} at {m:?}: {g:?} vs {fd:?}",
                measure.id()
            );
        }
    }
}
