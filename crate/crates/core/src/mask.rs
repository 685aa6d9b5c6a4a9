//! Four-class label images and their on-disk encoding.

use std::path::Path;

use image::{GrayImage, ImageFormat, Luma};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Per-pixel class. Rim and handle pixels are part of the bag but stored exclusively.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum Label {
    Background = 0,
    Bag = 1,
    Rim = 2,
    Handle = 3,
}

impl Label {
    pub const ALL: [Label; 4] = [Label::Background, Label::Bag, Label::Rim, Label::Handle];

    /// Gray level used in mask files.
    pub fn gray(self) -> u8 {
        match self {
            Label::Background => 0,
            Label::Bag => 85,
            Label::Rim => 170,
            Label::Handle => 255,
        }
    }

    pub fn from_gray(v: u8) -> Option<Label> {
        match v {
            0 => Some(Label::Background),
            85 => Some(Label::Bag),
            170 => Some(Label::Rim),
            255 => Some(Label::Handle),
            _ => None,
        }
    }

    pub fn is_bag_region(self) -> bool {
        self != Label::Background
    }
}

/// A W×H label image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegMask {
    width: usize,
    height: usize,
    labels: Vec<Label>,
}

impl SegMask {
    pub fn new(width: usize, height: usize) -> Self {
        SegMask {
            width,
            height,
            labels: vec![Label::Background; width * height],
        }
    }

    pub fn from_labels(width: usize, height: usize, labels: Vec<Label>) -> Result<Self> {
        if labels.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: (width, height),
                found: (labels.len(), 1),
            });
        }
        Ok(SegMask {
            width,
            height,
            labels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    #[inline]
    pub fn in_bounds(&self, x: i32, y: i32) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    #[inline]
    pub fn get(&self, x: i32, y: i32) -> Label {
        self.labels[y as usize * self.width + x as usize]
    }

    /// Label at `(x, y)`, or `None` outside the image.
    pub fn try_get(&self, x: i32, y: i32) -> Option<Label> {
        self.in_bounds(x, y).then(|| self.get(x, y))
    }

    #[inline]
    pub fn set(&mut self, x: i32, y: i32, label: Label) {
        let w = self.width;
        self.labels[y as usize * w + x as usize] = label;
    }

    /// Sets the pixel if it is inside the image.
    pub fn put(&mut self, x: i32, y: i32, label: Label) {
        if self.in_bounds(x, y) {
            self.set(x, y, label);
        }
    }

    /// Row-major iterator over `(x, y, label)`.
    pub fn iter(&self) -> impl Iterator<Item = (i32, i32, Label)> + '_ {
        let w = self.width;
        self.labels
            .iter()
            .enumerate()
            .map(move |(i, &l)| ((i % w) as i32, (i / w) as i32, l))
    }

    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    pub fn bag_region_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_bag_region()).count()
    }

    /// All pixels carrying `label`, row-major.
    pub fn pixels_of(&self, label: Label) -> Vec<(i32, i32)> {
        self.iter()
            .filter(|&(_, _, l)| l == label)
            .map(|(x, y, _)| (x, y))
            .collect()
    }

    /// All non-background pixels, row-major.
    pub fn bag_region_pixels(&self) -> Vec<(i32, i32)> {
        self.iter()
            .filter(|&(_, _, l)| l.is_bag_region())
            .map(|(x, y, _)| (x, y))
            .collect()
    }

    /// Short content digest used in trial logs.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.width as u64).to_le_bytes());
        h.update((self.height as u64).to_le_bytes());
        h.update(self.labels.iter().map(|&l| l as u8).collect::<Vec<_>>());
        let out = h.finalize();
        out[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_gray_image(&self) -> GrayImage {
        GrayImage::from_fn(self.width as u32, self.height as u32, |x, y| {
            Luma([self.get(x as i32, y as i32).gray()])
        })
    }

    pub fn from_gray_image(img: &GrayImage) -> Result<Self> {
        let (w, h) = img.dimensions();
        let mut labels = Vec::with_capacity((w * h) as usize);
        for (x, y, p) in img.enumerate_pixels() {
            let l = Label::from_gray(p[0]).ok_or(Error::InvalidMaskValue { x, y, value: p[0] })?;
            labels.push(l);
        }
        SegMask::from_labels(w as usize, h as usize, labels)
    }

    /// Binary PGM (P5) encoding.
    pub fn to_pgm_bytes(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.labels.iter().map(|l| l.gray()));
        out
    }

    /// Writes the mask; `.png` selects PNG, anything else PGM.
    pub fn save(&self, path: &Path) -> Result<()> {
        let is_png = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if is_png {
            self.to_gray_image()
                .save_with_format(path, ImageFormat::Png)
                .map_err(|e| Error::io(path, e))
        } else {
            std::fs::write(path, self.to_pgm_bytes()).map_err(|e| Error::io(path, e))
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let img = image::open(path).map_err(|e| Error::io(path, e))?;
        SegMask::from_gray_image(&img.to_luma8())
    }

    /// Rotates the image by 90° counter-clockwise as displayed (x right, y down).
    /// Pixel `(x, y)` moves to `(y, W-1-x)`.
    pub fn rotate90(&self) -> SegMask {
        let (w, h) = (self.width, self.height);
        let mut out = SegMask::new(h, w);
        for (x, y, l) in self.iter() {
            out.set(y, w as i32 - 1 - x, l);
        }
        out
    }

    /// Mirrors left-right: `(x, y)` moves to `(W-1-x, y)`.
    pub fn mirror_x(&self) -> SegMask {
        let mut out = SegMask::new(self.width, self.height);
        for (x, y, l) in self.iter() {
            out.set(self.width as i32 - 1 - x, y, l);
        }
        out
    }
}
