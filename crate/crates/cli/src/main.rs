use std::process::exit;

fn main() {
    exit(denslab::run_cli(std::env::args_os()));
}
