//! Real R² multipoles are real parts of complex poles: for each order n,
//! Re{μ/(z − z_k)^n} = a·A^(n) + b·B^(n) with (a, b) read off μ.
//!
//!     cargo run --example multipole_correspondence

use num_complex::Complex64;
use pointsource::complex_basis::{pole, psi};
use pointsource::real_basis::{multipole_r2, multipole_to_pole, pole_to_multipole, psi_r2};

fn main() -> pointsource::Result<()> {
    let zk = Complex64::new(0.2, -0.35);
    let mu = Complex64::new(0.7, -1.3);
    let z = Complex64::new(1.4, 0.9);
    let (x, xk) = ([z.re, z.im], [zk.re, zk.im]);

    for n in 1..=3 {
        let (a, b) = pole_to_multipole(mu, n)?;
        let (big_a, big_b) = multipole_r2(x, xk, n)?;
        let complex = (mu * pole(z, zk, n)?).re;
        let real = a * big_a + b * big_b;
        println!("n = {n}: (a, b) = ({a:+.4}, {b:+.4})  Re pole {complex:+.15}  multipole {real:+.15}");
        assert!((multipole_to_pole(a, b, n)? - mu).norm() < 1e-14);
    }

    let log = psi(z, zk)?.re;
    println!("\nRe psi = {log:+.15}\npsi_r2 = {:+.15}", psi_r2(x, xk)?);
    Ok(())
}
