//! Plan the swing order for a damaged robot.
//!
//! ```bash
//! cargo run --example plan_gait -- 111011
//! cargo run --example plan_gait -- all
//! ```

use hexapod_recovery::gait::support_count_profile;
use hexapod_recovery::{check_neighborhood_rule, plan_sequence, validate_morphology, MorphologyVector};

fn show(m: &MorphologyVector) {
    let class = validate_morphology(m);
    let Ok(s) = plan_sequence(m, 2.0) else {
        println!("{m}: unrecoverable ({})", class.diagnostic().unwrap_or_default());
        return;
    };
    let groups: Vec<Vec<usize>> = (0..s.sigma()).map(|slot| s.swinging_in(slot)).collect();
    let support: Vec<usize> = support_count_profile(&s, m).iter().map(|(_, n)| *n).collect();
    println!(
        "{m}: {:<24} swing groups {groups:?}  support counts {support:?}  neighbourhood rule {}",
        s.kind().name(),
        check_neighborhood_rule(&s, m)
    );
}

fn main() {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "111011".into());
    if arg == "all" {
        MorphologyVector::all().filter(|m| validate_morphology(m).is_recoverable()).for_each(|m| show(&m));
        return;
    }
    let m: MorphologyVector = match arg.parse() {
        Ok(m) => m,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    show(&m);
    if let Ok(s) = plan_sequence(&m, 2.0) {
        println!("{}", s.to_json());
    }
}
