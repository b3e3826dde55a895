//! Normal forms in the built-in families: free groups, a finite table, a
//! free product and a small-cancellation surface group.

use relhyp::groups::{Group, GroupSpec};

fn main() -> relhyp::Result<()> {
    let f2 = Group::new(GroupSpec::free(&["a", "b"]))?;
    for w in ["a b b' a'", "a b a' b'", "a^3 a'^2"] {
        println!("F2      {w:>14}  ->  {}", f2.format(&f2.reduce(w)?));
    }

    let z3z2 = Group::new(GroupSpec::free_product(
        vec![GroupSpec::cyclic("a", 3), GroupSpec::cyclic("b", 2)],
        vec![0, 1],
    ))?;
    for w in ["a a a", "a' b b a'", "b a b a b a"] {
        println!("Z3*Z2   {w:>14}  ->  {}", z3z2.format(&z3z2.reduce(w)?));
    }

    let surface = Group::new(GroupSpec::small_cancellation(
        &["a", "b", "c", "d"],
        &["a b a' b' c d c' d'"],
    ))?;
    for w in ["a b a' b' c d c' d'", "a b a' b' c d", "d c d' c' b a b' a'"] {
        let g = surface.reduce(w)?;
        println!("genus 2 {w:>22}  ->  {}", surface.format(&g));
    }
    Ok(())
}
