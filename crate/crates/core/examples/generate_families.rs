//! Write one desk-sized instance from each of the four families to disk,
//! with a manifest per family, and print what landed where.
//!
//! ```text
//! cargo run --example generate_families
//! ```

use branchlab::generators::preset;
use branchlab::io::{checksum_hex, write_instance, write_manifest, Manifest, ManifestEntry};
use std::fs;

fn main() -> std::io::Result<()> {
    let root = std::env::temp_dir().join("branchlab-families");
    fs::create_dir_all(&root)?;

    for name in ["setcover-desk", "cauctions-desk", "facilities-desk", "indset-desk"] {
        let spec = preset(name).expect("known preset");
        let family = spec.family_name();
        let dir = root.join(family);
        fs::create_dir_all(&dir)?;

        let base_seed = 1;
        let mut files = Vec::new();
        for i in 0..2usize {
            let seed = base_seed + i as u64;
            let instance = spec.generate(seed).expect("generator succeeds");
            let file = format!("{family}_{i:03}.mip");
            let path = dir.join(&file);
            write_instance(&path, &instance)?;
            let checksum = checksum_hex(&fs::read(&path)?);
            println!(
                "{:<22} {:>4} vars {:>4} rows  checksum {}",
                format!("{family}/{file}"),
                instance.n_vars(),
                instance.n_rows(),
                checksum
            );
            files.push(ManifestEntry { file, seed, checksum });
        }
        let manifest =
            Manifest { family: family.to_string(), spec, base_seed, count: files.len(), files };
        write_manifest(&dir.join("manifest.json"), &manifest)?;
    }

    println!("\ninstances and manifests under {}", root.display());
    Ok(())
}
