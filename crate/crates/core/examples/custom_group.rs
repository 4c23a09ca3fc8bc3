//! Groups and settings from text: a generator file in the `name` plus
//! four-reals format, loaded through a `key = value` config.
//!
//!     cargo run --release --example custom_group

use horolab::{Config, FuchsianGroup};

fn main() -> horolab::Result<()> {
    let dir = std::env::temp_dir().join("horolab-custom-group");
    std::fs::create_dir_all(&dir)?;

    // the Bolza generators written out and read back as a file-backed group
    let file = dir.join("octagon.txt");
    std::fs::write(&file, FuchsianGroup::preset_bolza().to_text().replace("name bolza", "name octagon"))?;

    let cfg_text = format!(
        "# file-backed group with a smaller ball budget\ngroup.file = {}\nenum.max_ball_size = 200000\nseeds.default = 11\n",
        file.display()
    );
    let cfg = Config::parse(&cfg_text)?;
    let group = cfg.group()?;
    println!("loaded `{}` with {} generators", group.name(), group.generators().len());
    println!("trace gap {:.9}", group.trace_gap()?);
    print!("effective config:\n{}", cfg.dump());

    match Config::parse("enum.max_radius = 3") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => println!("unexpectedly accepted"),
    }
    Ok(())
}
