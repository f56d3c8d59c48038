//! Generates the bundled product-matching fixture.
//!
//! The left table mimics a retailer catalog with long descriptions; the right
//! table mimics a second retailer with terser names, sparse descriptions and
//! an extra manufacturer column. Some products come in families whose members
//! differ only in screen size or model suffix, which makes for hard
//! non-matches.
//!
//! Usage: `cargo run --example make_fixture -- <out-dir> [seed]`

use std::collections::HashSet;
use std::path::PathBuf;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Category {
    left: &'static str,
    right: &'static [&'static str],
    series: &'static [&'static str],
    specs: &'static [&'static str],
    sizes: &'static [u32],
    brands: &'static [&'static str],
    price: (f64, f64),
}

const CATEGORIES: &[Category] = &[
    Category {
        left: "LCD HDTV",
        right: &["LCD TV", "LCD HDTV", "Flat Panel TV"],
        series: &["Bravia", "Aquos", "Regza", "Viera", "Series 6"],
        specs: &["1080p", "120Hz", "4 HDMI Inputs", "Dynamic Contrast", "ENERGY STAR"],
        sizes: &[32, 37, 40, 46, 52],
        brands: &["Sony", "Sharp", "Toshiba", "Samsung", "LG", "Panasonic"],
        price: (499.0, 2499.0),
    },
    Category {
        left: "Digital Camera",
        right: &["Digital Camera", "Digital Still Camera"],
        series: &["Cyber-shot", "PowerShot", "Coolpix", "Lumix", "Stylus"],
        specs: &["10.1 Megapixel", "12.1 Megapixel", "5x Optical Zoom", "2.7in LCD", "Image Stabilization"],
        sizes: &[],
        brands: &["Sony", "Canon", "Nikon", "Panasonic", "Olympus"],
        price: (149.0, 599.0),
    },
    Category {
        left: "Camcorder",
        right: &["Camcorder", "HD Camcorder", "Flash Memory Camcorder"],
        series: &["Handycam", "Everio", "Vixia"],
        specs: &["60GB Hard Drive", "Full HD", "40x Optical Zoom", "Touch Panel LCD"],
        sizes: &[],
        brands: &["Sony", "JVC", "Canon", "Panasonic"],
        price: (299.0, 1199.0),
    },
    Category {
        left: "Blu-ray Disc Player",
        right: &["Blu-ray Player", "Blu-ray Disc Player"],
        series: &["BD Live", "Profile 2.0"],
        specs: &["1080p Output", "BD-Live", "HDMI 1.3", "DVD Upscaling"],
        sizes: &[],
        brands: &["Sony", "Samsung", "Panasonic", "LG", "Pioneer", "Denon"],
        price: (179.0, 799.0),
    },
    Category {
        left: "Home Theater System",
        right: &["Home Theater System", "Home Theater in a Box"],
        series: &["Dream System", "Cinema Surround"],
        specs: &["5.1 Channel", "1000 Watts", "DVD Player", "HDMI Output"],
        sizes: &[],
        brands: &["Sony", "Samsung", "Panasonic", "Bose", "Philips", "LG"],
        price: (249.0, 1499.0),
    },
    Category {
        left: "Audio/Video Receiver",
        right: &["AV Receiver", "A/V Receiver", "Audio Video Receiver"],
        series: &["Elite", "Aventage", "STR"],
        specs: &["7.1 Channel", "100 Watts Per Channel", "HDMI Switching", "Dolby TrueHD"],
        sizes: &[],
        brands: &["Yamaha", "Denon", "Pioneer", "Onkyo", "Sony", "Kenwood"],
        price: (299.0, 1999.0),
    },
    Category {
        left: "Bluetooth Headset",
        right: &["Bluetooth Headset", "Wireless Headset"],
        series: &["Discovery", "Voyager", "Jawbone"],
        specs: &["Noise Reduction", "6 Hours Talk Time", "Multipoint"],
        sizes: &[],
        brands: &["Plantronics", "Jabra", "Motorola", "Aliph"],
        price: (39.0, 129.0),
    },
    Category {
        left: "Wireless-N Router",
        right: &["Wireless Router", "Wireless-N Broadband Router"],
        series: &["RangeMax", "Ultra Range"],
        specs: &["802.11n", "4-Port Switch", "WPA2 Security", "Gigabit Ports"],
        sizes: &[],
        brands: &["Linksys", "Netgear", "Belkin", "D-Link"],
        price: (59.0, 199.0),
    },
    Category {
        left: "Portable GPS Navigator",
        right: &["GPS Navigator", "Portable GPS", "GPS Receiver"],
        series: &["nuvi", "Go", "Magellan RoadMate"],
        specs: &["4.3in Touchscreen", "Text-to-Speech", "Lane Assist", "Bluetooth Hands-Free"],
        sizes: &[],
        brands: &["Garmin", "TomTom", "Magellan"],
        price: (129.0, 449.0),
    },
    Category {
        left: "Bookshelf Speakers",
        right: &["Bookshelf Speakers", "Speaker System", "2-Way Speakers"],
        series: &["Reference", "Acoustimass", "Studio Monitor"],
        specs: &["2-Way Design", "Magnetically Shielded", "Pair", "100 Watts"],
        sizes: &[],
        brands: &["Polk Audio", "Bose", "Klipsch", "Yamaha", "Pioneer"],
        price: (99.0, 699.0),
    },
    Category {
        left: "Cordless Phone",
        right: &["Cordless Telephone", "DECT 6.0 Cordless Phone"],
        series: &["DECT 6.0", "Expandable"],
        specs: &["Digital Answering System", "Caller ID", "Speakerphone", "3 Handsets"],
        sizes: &[],
        brands: &["Panasonic", "Uniden", "VTech", "Philips"],
        price: (49.0, 199.0),
    },
    Category {
        left: "Wireless Mouse",
        right: &["Cordless Mouse", "Wireless Mouse", "Wireless Laser Mouse"],
        series: &["Performance", "VX Nano", "Sculpt"],
        specs: &["Laser Tracking", "Unifying Receiver", "Hyper-Fast Scrolling"],
        sizes: &[],
        brands: &["Logitech", "Microsoft", "Kensington"],
        price: (19.0, 99.0),
    },
];

const COLORS: &[&str] = &["Black", "Silver", "White", "Red", "Blue", "Gunmetal"];
const FILLER: &[&str] = &[
    "Enjoy crisp detail and rich color",
    "Designed for everyday use",
    "Sleek design fits any room",
    "Easy setup with on-screen guide",
    "Backed by manufacturer warranty",
    "Compact and lightweight",
];

#[derive(Clone)]
struct Product {
    brand: &'static str,
    cat: usize,
    series: &'static str,
    size: Option<u32>,
    model: String,
    specs: Vec<&'static str>,
    color: &'static str,
    price: f64,
}

fn model_number(rng: &mut ChaCha8Rng, brand: &str, size: Option<u32>) -> String {
    let letters: String = brand
        .chars()
        .filter(|c| c.is_ascii_alphabetic())
        .take(2)
        .collect::<String>()
        .to_uppercase();
    let extra = ['X', 'V', 'S', 'T', 'Z', 'R'].choose(rng).expect("nonempty");
    let mid = size.map_or_else(|| rng.random_range(10..99).to_string(), |s| s.to_string());
    let tail = rng.random_range(100..9999);
    format!("{letters}{extra}{mid}{}{tail}", ['A', 'B', 'C', 'D', 'E'].choose(rng).expect("nonempty"))
}

fn new_product(rng: &mut ChaCha8Rng, models: &mut HashSet<String>) -> Product {
    let cat_idx = rng.random_range(0..CATEGORIES.len());
    let cat = &CATEGORIES[cat_idx];
    let brand = *cat.brands.choose(rng).expect("nonempty");
    let size = cat.sizes.choose(rng).copied();
    let model = loop {
        let m = model_number(rng, brand, size);
        if models.insert(m.clone()) {
            break m;
        }
    };
    let mut specs: Vec<&'static str> = cat.specs.to_vec();
    specs.shuffle(rng);
    specs.truncate(rng.random_range(2..=specs.len().min(4)));
    Product {
        brand,
        cat: cat_idx,
        series: cat.series.choose(rng).expect("nonempty"),
        size,
        model,
        specs,
        color: COLORS.choose(rng).expect("nonempty"),
        price: (rng.random_range(cat.price.0..cat.price.1) as u32) as f64 + 0.99,
    }
}

/// Family member: same brand, category and series; another size or model tail.
fn sibling(rng: &mut ChaCha8Rng, p: &Product, models: &mut HashSet<String>) -> Product {
    let cat = &CATEGORIES[p.cat];
    let mut q = p.clone();
    loop {
        q.size = if cat.sizes.is_empty() { None } else { cat.sizes.choose(rng).copied() };
        let m = model_number(rng, p.brand, q.size);
        if models.insert(m.clone()) {
            q.model = m;
            break;
        }
    }
    q.color = COLORS.choose(rng).expect("nonempty");
    q.price = (p.price * rng.random_range(0.7..1.4)).floor() + 0.99;
    q
}

fn size_text(p: &Product, unit: &str) -> String {
    p.size.map(|s| format!("{s}{unit} ")).unwrap_or_default()
}

fn left_row(rng: &mut ChaCha8Rng, p: &Product) -> [String; 3] {
    let cat = &CATEGORIES[p.cat];
    let name = match rng.random_range(0..3) {
        0 => format!("{} {} {}{} - {}", p.brand, p.series, size_text(p, "''"), cat.left, p.model),
        1 => format!("{} {}{} {}", p.brand, size_text(p, "\""), cat.left, p.model),
        _ => format!("{} {} {} {}{}", p.brand, p.model, p.series, size_text(p, "''"), cat.left),
    };
    let mut desc = format!("{} {} {}{} - {}", p.brand, p.series, size_text(p, "''"), cat.left, p.model);
    for s in &p.specs {
        desc.push_str("/ ");
        desc.push_str(s);
    }
    desc.push_str(&format!("/ {}. {}.", p.color, FILLER.choose(rng).expect("nonempty")));
    [name, desc, format!("${:.2}", p.price)]
}

fn right_model(rng: &mut ChaCha8Rng, model: &str) -> Option<String> {
    let split = model.find(|c: char| c.is_ascii_digit()).unwrap_or(0);
    match rng.random_range(0..20) {
        0..=9 => Some(model.to_string()),
        10..=14 => Some(format!("{}-{}", &model[..split], &model[split..])),
        15..=17 => Some(format!("{model}/{}", ["B", "S", "K"].choose(rng).expect("nonempty"))),
        _ => None,
    }
}

fn right_row(rng: &mut ChaCha8Rng, p: &Product) -> [String; 4] {
    let cat = &CATEGORIES[p.cat];
    let cat_name = cat.right.choose(rng).expect("nonempty");
    let model = right_model(rng, &p.model);
    let series = if rng.random_bool(0.5) { format!("{} ", p.series) } else { String::new() };
    let name = match &model {
        Some(m) if rng.random_bool(0.5) => {
            format!("{} {m} {series}{}{cat_name} - {}", p.brand, size_text(p, "\""), p.color)
        }
        Some(m) => format!("{} {series}{}{cat_name} - {m}", p.brand, size_text(p, "\"")),
        None => format!("{} {series}{}{cat_name} ({})", p.brand, size_text(p, "\""), p.color),
    };
    let desc = if rng.random_bool(0.5) {
        String::new()
    } else {
        let mut specs = p.specs.clone();
        specs.shuffle(rng);
        specs.truncate(2);
        specs.join(", ")
    };
    let manufacturer = match rng.random_range(0..4) {
        0 => p.brand.to_uppercase(),
        _ => p.brand.to_string(),
    };
    let price = if rng.random_bool(0.15) {
        String::new()
    } else {
        format!("{:.2}", (p.price * rng.random_range(0.85..1.1)).floor() + 0.99)
    };
    [name, desc, manufacturer, price]
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().ok_or("usage: make_fixture <out-dir> [seed]")?);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(7);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    std::fs::create_dir_all(&out)?;

    // Nearly every right tuple has a counterpart on the left, as in the
    // retail benchmarks this imitates; unmatched products sit mostly on the
    // left.
    const N_LEFT: usize = 210;
    const N_MATCHED: usize = 190;
    const N_RIGHT_ONLY: usize = 6;

    let mut models = HashSet::new();
    let mut left: Vec<Product> = Vec::with_capacity(N_LEFT);
    while left.len() < N_LEFT {
        let p = match left.last() {
            Some(prev) if rng.random_bool(0.3) => sibling(&mut rng, prev, &mut models),
            _ => new_product(&mut rng, &mut models),
        };
        left.push(p);
    }
    let mut order: Vec<usize> = (0..N_LEFT).collect();
    order.shuffle(&mut rng);
    let matched: Vec<usize> = order[..N_MATCHED].to_vec();

    let mut right: Vec<(Product, Option<usize>)> = matched.iter().map(|&i| (left[i].clone(), Some(i))).collect();
    for _ in 0..N_RIGHT_ONLY {
        right.push((new_product(&mut rng, &mut models), None));
    }
    right.shuffle(&mut rng);

    let mut lw = csv::Writer::from_path(out.join("left.csv"))?;
    lw.write_record(["id", "name", "description", "price"])?;
    for (i, p) in left.iter().enumerate() {
        let [name, desc, price] = left_row(&mut rng, p);
        lw.write_record([format!("a{:04}", i + 1), name, desc, price])?;
    }
    lw.flush()?;

    let mut rw = csv::Writer::from_path(out.join("right.csv"))?;
    rw.write_record(["id", "name", "description", "manufacturer", "price"])?;
    let mut matches = Vec::new();
    for (j, (p, origin)) in right.iter().enumerate() {
        let [name, desc, manufacturer, price] = right_row(&mut rng, p);
        let id = format!("b{:04}", j + 1);
        if let Some(i) = origin {
            matches.push((format!("a{:04}", i + 1), id.clone()));
        }
        rw.write_record([id, name, desc, manufacturer, price])?;
    }
    rw.flush()?;

    matches.sort();
    let mut mw = csv::Writer::from_path(out.join("matches.csv"))?;
    mw.write_record(["left_id", "right_id"])?;
    for (l, r) in matches {
        mw.write_record([l, r])?;
    }
    mw.flush()?;
    Ok(())
}
