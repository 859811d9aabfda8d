use std::process::ExitCode;

fn main() -> ExitCode {
    coord_bid_sim::cli::main()
}
