//! The dataset container: a text header describing the system followed by
//! raw little-endian channel records, with optional ground-truth positions.
//! Round-trips are bit exact, so a dataset written twice from the same
//! source is byte identical and safe to diff in CI.

use cchart::io::{read_dataset, write_dataset, Dataset};
use cchart::{sample_ues, synth_channel, ArrayGeometry, RegionSpec, SystemConfig};

fn main() {
    let config = SystemConfig::new(3e9, 625e3, 16, ArrayGeometry::Ula { na: 16, spacing: 0.5 })
        .expect("parameters are valid");
    let region = RegionSpec::new(200.0, 400.0, -0.4, 0.4).expect("region is valid");
    let positions = sample_ues(&region, 20, 3);
    let channels: Vec<_> = positions
        .iter()
        .map(|p| {
            let mut h = synth_channel(&config, p);
            h.position = Some(*p); // tag with ground truth
            h
        })
        .collect();

    let path = std::env::temp_dir().join("cchart_dataset_io.ccd");
    let dataset = Dataset { config: config.clone(), channels };
    write_dataset(&path, &dataset.config, &dataset.channels).expect("temp dir is writable");

    let bytes = std::fs::read(&path).expect("file was written");
    println!("wrote {} ({} bytes for 20 records)", path.display(), bytes.len());
    let header_end = bytes.windows(7).position(|w| w == b"\ndata:\n").expect("marker exists");
    println!("--- header ---");
    print!("{}", String::from_utf8_lossy(&bytes[..header_end + 1]));
    println!("--- body: {} bytes of little-endian f64 ---", bytes.len() - header_end - 7);
    println!();

    let back = read_dataset(&path).expect("file parses");
    assert_eq!(back.channels.len(), dataset.channels.len());
    assert!(back.has_ground_truth());
    let bitwise = dataset.channels.iter().zip(&back.channels).all(|(a, b)| {
        a.entries.iter().zip(&b.entries).all(|(x, y)| {
            x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()
        })
    });
    println!("round trip bit exact: {bitwise}");

    // Rewriting what was read reproduces the file byte for byte.
    let path2 = std::env::temp_dir().join("cchart_dataset_io_2.ccd");
    write_dataset(&path2, &back.config, &back.channels).expect("temp dir is writable");
    let bytes2 = std::fs::read(&path2).expect("file was written");
    println!("rewrite byte identical: {}", bytes == bytes2);
}
