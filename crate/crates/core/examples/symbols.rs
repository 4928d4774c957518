//! Bernstein symbols: values, tails and the boundary class of the pair (Ψ, η).

use nonlocal_heat::BernsteinSymbol;

fn main() -> nonlocal_heat::Result<()> {
    let symbols = [
        BernsteinSymbol::stable(0.5)?,
        BernsteinSymbol::gamma(1.0, 2.0)?,
        BernsteinSymbol::tempered(0.5, 1.0)?,
        BernsteinSymbol::identity(),
    ];
    println!("{:<24} {:>10} {:>10} {:>10} {:>12}", "symbol", "Φ(1)", "Φ'(1)", "Π̄(1)", "tail check");
    for s in &symbols {
        let check = s.check_tail_identity(1.0)?;
        println!("{:<24} {:>10.6} {:>10.6} {:>10.6} {:>12.1e}", s.name(), s.phi(1.0), s.phi_prime(1.0), s.tail(1.0), check);
    }
    for (a, b) in [(1.0, 2.0), (1.0, 1.0), (2.0, 1.0)] {
        let (class, c) = BernsteinSymbol::gamma(a, b)?.boundary_behavior_class();
        println!("gamma({a}, {b}): {class:?} (c = {c})");
    }
    Ok(())
}
