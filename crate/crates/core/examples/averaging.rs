//! The Toeplitz projection Φ and the Choi–Effros product on random elements.

use sphiso::circle::{self, ToeplitzElement};
use sphiso::random::{labelled_rng, random_element};
use sphiso::Result;

pub fn main() -> Result<()> {
    let mut worst: f64 = 0.0;
    for trial in 0..20 {
        let mut rng = labelled_rng(1, "example.averaging", trial);
        let x = random_element(&mut rng, 4, 3);
        let y = random_element(&mut rng, 4, 3);
        let r = circle::verify_averaging_identities(&x, &y);
        worst = worst.max(r.max_difference).max(r.choi_effros_deviation);
        if trial == 0 {
            println!("Φ(X)Φ(Y) product symbol: {}", r.choi_effros.symbol().to_text());
        }
    }
    println!("largest deviation over 20 pairs: {worst:e}");
    let id = ToeplitzElement::identity();
    println!("Φ(I) = I: {}", id.project_phi() == id);
    Ok(())
}
