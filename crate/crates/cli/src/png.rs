//! Minimal raster output: heatmaps and line plots without text.

use std::path::Path;

use image::{Rgb, RgbImage};

// Sampled from a perceptually uniform blue-green-yellow map.
const MAP: [[u8; 3]; 6] = [
    [68, 1, 84],
    [64, 67, 135],
    [41, 120, 142],
    [34, 167, 132],
    [121, 209, 81],
    [253, 231, 36],
];

fn colour(t: f64) -> Rgb<u8> {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let s = t * (MAP.len() - 1) as f64;
    let i = (s.floor() as usize).min(MAP.len() - 2);
    let w = s - i as f64;
    let mix = |k: usize| (MAP[i][k] as f64 * (1.0 - w) + MAP[i + 1][k] as f64 * w).round() as u8;
    Rgb([mix(0), mix(1), mix(2)])
}

fn bounds(data: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = data
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if lo < hi {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    }
}

/// Row-major `nx × ny` data, `y` increasing upwards.
pub fn heatmap(path: &Path, nx: usize, ny: usize, data: &[f64]) -> Result<(), String> {
    let scale = (512 / nx.max(ny)).max(1) as u32;
    let (lo, hi) = bounds(data.iter().copied());
    let mut img = RgbImage::new(nx as u32 * scale, ny as u32 * scale);
    for (px, py, p) in img.enumerate_pixels_mut() {
        let i = (px / scale) as usize;
        let j = ny - 1 - (py / scale) as usize;
        *p = colour((data[j * nx + i] - lo) / (hi - lo));
    }
    img.save(path).map_err(|e| format!("{}: {e}", path.display()))
}

/// Polylines `(x, y)` on shared axes.
pub fn lines(path: &Path, curves: &[(&[f64], &[f64])]) -> Result<(), String> {
    const W: u32 = 800;
    const H: u32 = 400;
    const PAD: f64 = 20.0;
    let (x0, x1) = bounds(curves.iter().flat_map(|c| c.0.iter().copied()));
    let (y0, y1) = bounds(curves.iter().flat_map(|c| c.1.iter().copied()));
    let mut img = RgbImage::from_pixel(W, H, Rgb([255, 255, 255]));
    let to_px = |x: f64, y: f64| {
        (
            PAD + (x - x0) / (x1 - x0) * (W as f64 - 2.0 * PAD),
            H as f64 - PAD - (y - y0) / (y1 - y0) * (H as f64 - 2.0 * PAD),
        )
    };
    let frame = Rgb([160, 160, 160]);
    for x in PAD as u32..=W - PAD as u32 {
        img.put_pixel(x, PAD as u32, frame);
        img.put_pixel(x, H - PAD as u32, frame);
    }
    for y in PAD as u32..=H - PAD as u32 {
        img.put_pixel(PAD as u32, y, frame);
        img.put_pixel(W - PAD as u32, y, frame);
    }
    for (k, (xs, ys)) in curves.iter().enumerate() {
        let c = colour(if curves.len() > 1 { k as f64 / (curves.len() - 1) as f64 } else { 0.2 });
        for w in xs.iter().zip(ys.iter()).collect::<Vec<_>>().windows(2) {
            let (a, b) = (to_px(*w[0].0, *w[0].1), to_px(*w[1].0, *w[1].1));
            let steps = ((b.0 - a.0).abs().max((b.1 - a.1).abs()).ceil() as usize).max(1);
            for s in 0..=steps {
                let t = s as f64 / steps as f64;
                let (x, y) = (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
                if x >= 0.0 && y >= 0.0 && (x as u32) < W && (y as u32) < H {
                    img.put_pixel(x as u32, y as u32, c);
                }
            }
        }
    }
    img.save(path).map_err(|e| format!("{}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colour_ends() {
        assert_eq!(colour(0.0), Rgb(MAP[0]));
        assert_eq!(colour(1.0), Rgb(MAP[5]));
        assert_eq!(colour(f64::NAN), Rgb(MAP[0]));
    }

    #[test]
    fn writes_images() {
        let dir = tempfile::tempdir().unwrap();
        let data: Vec<f64> = (0..12).map(f64::from).collect();
        heatmap(&dir.path().join("h.png"), 4, 3, &data).unwrap();
        let xs = [0.0, 1.0, 2.0];
        lines(&dir.path().join("l.png"), &[(&xs, &[0.0, 1.0, 0.0])]).unwrap();
        let img = image::open(dir.path().join("h.png")).unwrap();
        assert_eq!((img.width(), img.height()), (512, 384));
    }
}
