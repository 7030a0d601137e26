//! `wiia` — command-line driver for the pulse-interaction laboratory.

fn main() -> anyhow::Result<()> {
    eprintln!("wiia: subcommands are being wired up");
    Ok(())
}
