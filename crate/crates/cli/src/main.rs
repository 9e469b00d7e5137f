use std::io::Write;

fn main() {
    let argv: Vec<_> = std::env::args_os().collect();
    let json = argv.iter().any(|a| a == "--json");
    let outcome = randstrat_cli::run(argv);
    let out = outcome.render(json);
    if outcome.code == 0 {
        print!("{out}");
    } else if json {
        print!("{out}");
        eprint!("{}", outcome.text);
    } else {
        eprint!("{out}");
    }
    let _ = std::io::stdout().flush();
    std::process::exit(outcome.code);
}
