//! Plane-level resampling and convolution. Borders use reflect-101.

use crate::imgcore::Image;

pub(super) fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    if n == 1 {
        return 0;
    }
    let period = 2 * (n - 1);
    let mut i = i.rem_euclid(period);
    if i >= n {
        i = period - i;
    }
    i as usize
}

pub(super) fn rebuild(like: &Image, width: usize, height: usize, data: Vec<f64>) -> Image {
    Image::with_range(width, height, like.channels(), data, like.pixel_min(), like.pixel_max())
        .expect("shape and range taken from an existing image")
}

pub(super) fn map_planes(img: &Image, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Image {
    let mut data = Vec::with_capacity(img.len());
    for c in 0..img.channels() {
        data.extend(f(img.plane(c)));
    }
    rebuild(img, img.width(), img.height(), data)
}

/// Triangle-filter resampling along one axis, widened when shrinking.
fn resample_weights(src: usize, dst: usize) -> Vec<(usize, Vec<f64>)> {
    let scale = src as f64 / dst as f64;
    let support = scale.max(1.0);
    (0..dst)
        .map(|i| {
            let center = (i as f64 + 0.5) * scale - 0.5;
            let lo = (center - support).floor() as isize;
            let hi = (center + support).ceil() as isize;
            let mut w: Vec<(usize, f64)> = Vec::new();
            for j in lo..=hi {
                let t = 1.0 - ((j as f64 - center) / support).abs();
                if t > 0.0 {
                    let jj = j.clamp(0, src as isize - 1) as usize;
                    w.push((jj, t));
                }
            }
            let sum: f64 = w.iter().map(|p| p.1).sum();
            let first = w.first().map_or(0, |p| p.0);
            let last = w.last().map_or(0, |p| p.0);
            let mut dense = vec![0.0; last - first + 1];
            for (j, t) in w {
                dense[j - first] += t / sum;
            }
            (first, dense)
        })
        .collect()
}

pub(super) fn resize_plane(p: &[f64], w: usize, h: usize, nw: usize, nh: usize) -> Vec<f64> {
    let xw = resample_weights(w, nw);
    let yw = resample_weights(h, nh);
    let mut tmp = vec![0.0; nw * h];
    for y in 0..h {
        let row = &p[y * w..(y + 1) * w];
        for (x, (start, ws)) in xw.iter().enumerate() {
            tmp[y * nw + x] = ws.iter().enumerate().map(|(k, wt)| wt * row[start + k]).sum();
        }
    }
    let mut out = vec![0.0; nw * nh];
    for (y, (start, ws)) in yw.iter().enumerate() {
        for x in 0..nw {
            out[y * nw + x] = ws
                .iter()
                .enumerate()
                .map(|(k, wt)| wt * tmp[(start + k) * nw + x])
                .sum();
        }
    }
    out
}

pub fn resize(img: &Image, nw: usize, nh: usize) -> Image {
    let (w, h) = (img.width(), img.height());
    if (w, h) == (nw, nh) {
        return img.clone();
    }
    let mut data = Vec::with_capacity(nw * nh * img.channels());
    for c in 0..img.channels() {
        data.extend(resize_plane(img.plane(c), w, h, nw, nh));
    }
    rebuild(img, nw, nh, data)
}

/// Crops `cw x ch` at `(x0, y0)` and resizes back to the input size.
pub fn crop_resize(img: &Image, x0: usize, y0: usize, cw: usize, ch: usize) -> Image {
    let (w, h) = (img.width(), img.height());
    let mut data = Vec::with_capacity(cw * ch * img.channels());
    for c in 0..img.channels() {
        let p = img.plane(c);
        for y in y0..y0 + ch {
            data.extend_from_slice(&p[y * w + x0..y * w + x0 + cw]);
        }
    }
    resize(&rebuild(img, cw, ch, data), w, h)
}

pub fn hflip(img: &Image) -> Image {
    let w = img.width();
    map_planes(img, |p| {
        p.chunks(w)
            .flat_map(|row| row.iter().rev().copied())
            .collect()
    })
}

fn bilinear(p: &[f64], w: usize, h: usize, x: f64, y: f64) -> f64 {
    let x0 = x.floor();
    let y0 = y.floor();
    let (fx, fy) = (x - x0, y - y0);
    let (x0, y0) = (x0 as isize, y0 as isize);
    let at = |xx: isize, yy: isize| p[reflect(yy, h) * w + reflect(xx, w)];
    (1.0 - fy) * ((1.0 - fx) * at(x0, y0) + fx * at(x0 + 1, y0))
        + fy * ((1.0 - fx) * at(x0, y0 + 1) + fx * at(x0 + 1, y0 + 1))
}

/// Counter-clockwise rotation about the centre, bilinear, reflect border.
pub fn rotate(img: &Image, degrees: f64) -> Image {
    let (w, h) = (img.width(), img.height());
    let (s, c) = degrees.to_radians().sin_cos();
    let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
    map_planes(img, |p| {
        let mut out = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                // inverse map; y axis points down
                let sx = c * dx - s * dy + cx;
                let sy = s * dx + c * dy + cy;
                out[y * w + x] = bilinear(p, w, h, sx, sy);
            }
        }
        out
    })
}

/// Separable convolution with a symmetric or arbitrary 1-D kernel pair.
pub fn convolve_separable(img: &Image, kx: &[f64], ky: &[f64]) -> Image {
    let (w, h) = (img.width(), img.height());
    let (rx, ry) = ((kx.len() / 2) as isize, (ky.len() / 2) as isize);
    map_planes(img, |p| {
        let mut tmp = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                tmp[y * w + x] = kx
                    .iter()
                    .enumerate()
                    .map(|(i, k)| k * p[y * w + reflect(x as isize + i as isize - rx, w)])
                    .sum();
            }
        }
        let mut out = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                out[y * w + x] = ky
                    .iter()
                    .enumerate()
                    .map(|(i, k)| k * tmp[reflect(y as isize + i as isize - ry, h) * w + x])
                    .sum();
            }
        }
        out
    })
}

/// Dense 2-D correlation with a `k x k` kernel (row-major).
pub fn convolve2d(img: &Image, kernel: &[f64], k: usize) -> Image {
    let (w, h) = (img.width(), img.height());
    let r = (k / 2) as isize;
    let taps: Vec<(isize, isize, f64)> = (0..k * k)
        .filter(|&i| kernel[i] != 0.0)
        .map(|i| ((i % k) as isize - r, (i / k) as isize - r, kernel[i]))
        .collect();
    map_planes(img, |p| {
        let mut out = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                out[y * w + x] = taps
                    .iter()
                    .map(|&(dx, dy, wt)| {
                        wt * p[reflect(y as isize + dy, h) * w + reflect(x as isize + dx, w)]
                    })
                    .sum();
            }
        }
        out
    })
}

pub fn gaussian_kernel(k: usize, sigma: f64) -> Vec<f64> {
    let r = (k / 2) as f64;
    let mut g: Vec<f64> = (0..k)
        .map(|i| (-((i as f64 - r).powi(2)) / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = g.iter().sum();
    g.iter_mut().for_each(|v| *v /= s);
    g
}

pub fn gaussian_blur(img: &Image, k: usize, sigma: f64) -> Image {
    let g = gaussian_kernel(k, sigma);
    convolve_separable(img, &g, &g)
}

pub fn box_blur(img: &Image, k: usize) -> Image {
    let b = vec![1.0 / k as f64; k];
    convolve_separable(img, &b, &b)
}

pub fn median_blur(img: &Image, k: usize) -> Image {
    let (w, h) = (img.width(), img.height());
    let r = (k / 2) as isize;
    map_planes(img, |p| {
        let mut window = Vec::with_capacity(k * k);
        let mut out = vec![0.0; w * h];
        for y in 0..h as isize {
            for x in 0..w as isize {
                window.clear();
                for dy in -r..=r {
                    for dx in -r..=r {
                        window.push(p[reflect(y + dy, h) * w + reflect(x + dx, w)]);
                    }
                }
                let mid = window.len() / 2;
                window.select_nth_unstable_by(mid, f64::total_cmp);
                out[y as usize * w + x as usize] = window[mid];
            }
        }
        out
    })
}

/// Line kernel of odd size `k` at `angle` degrees; `direction` in `[-1, 1]`
/// tilts the weights toward one end (0 gives a uniform line).
pub fn motion_kernel(k: usize, angle: f64, direction: f64) -> Vec<f64> {
    let d = (direction.clamp(-1.0, 1.0) + 1.0) / 2.0;
    let c = (k / 2) as f64;
    let (s, co) = angle.to_radians().sin_cos();
    let mut kernel = vec![0.0; k * k];
    for i in 0..k {
        let wt = if k > 1 {
            d + (1.0 - 2.0 * d) * i as f64 / (k - 1) as f64
        } else {
            1.0
        };
        let t = i as f64 - c;
        // bilinear splat of the sample at distance t along the line
        let (x, y) = (c + t * co, c - t * s);
        let (x0, y0) = (x.floor(), y.floor());
        let (fx, fy) = (x - x0, y - y0);
        for (dx, dy, f) in [
            (0.0, 0.0, (1.0 - fx) * (1.0 - fy)),
            (1.0, 0.0, fx * (1.0 - fy)),
            (0.0, 1.0, (1.0 - fx) * fy),
            (1.0, 1.0, fx * fy),
        ] {
            let (xx, yy) = (x0 + dx, y0 + dy);
            if f > 0.0 && xx >= 0.0 && yy >= 0.0 && (xx as usize) < k && (yy as usize) < k {
                kernel[yy as usize * k + xx as usize] += wt * f;
            }
        }
    }
    let sum: f64 = kernel.iter().sum();
    if sum > 0.0 {
        kernel.iter_mut().for_each(|v| *v /= sum);
    } else {
        kernel[(k / 2) * k + k / 2] = 1.0;
    }
    kernel
}

/// Indices of a `w x h` grid in zig-zag order (anti-diagonals, alternating).
pub fn zigzag_order(w: usize, h: usize) -> Vec<usize> {
    let mut idx: Vec<(usize, usize)> = (0..h).flat_map(|v| (0..w).map(move |u| (u, v))).collect();
    idx.sort_by_key(|&(u, v)| {
        let s = u + v;
        (s, if s % 2 == 0 { u } else { v })
    });
    idx.into_iter().map(|(u, v)| v * w + u).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflect_101() {
        let got: Vec<usize> = (-3..7).map(|i| reflect(i, 4)).collect();
        assert_eq!(got, [3, 2, 1, 0, 1, 2, 3, 2, 1, 0]);
    }

    #[test]
    fn resize_preserves_constant_and_identity() {
        let img = Image::filled(10, 6, 3, 77.0);
        let r = resize(&img, 4, 3);
        assert!(r.data().iter().all(|v| (v - 77.0).abs() < 1e-9));
        assert_eq!(resize(&img, 10, 6), img);
    }

    #[test]
    fn zero_rotation_is_identity() {
        let data: Vec<f64> = (0..5 * 4 * 3).map(|i| (i * 7 % 255) as f64).collect();
        let img = Image::from_data(5, 4, 3, data).unwrap();
        let r = rotate(&img, 0.0);
        for (a, b) in r.data().iter().zip(img.data()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn motion_kernel_is_normalised() {
        for (k, a, d) in [(3, 0.0, 0.0), (5, 25.0, -0.25), (9, -90.0, 1.0)] {
            let m = motion_kernel(k, a, d);
            assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let flat = motion_kernel(3, 0.0, 0.0);
        assert!((flat[3] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn zigzag_starts_like_jpeg() {
        assert_eq!(&zigzag_order(8, 8)[..6], &[0, 1, 8, 16, 9, 2]);
    }
}
