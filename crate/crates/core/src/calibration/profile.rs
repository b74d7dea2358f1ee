use std::collections::BTreeMap;
use std::path::Path;

use base64::Engine;
use serde::{Deserialize, Serialize};

use crate::calibration::distortion::{undistort_frame, DistortionModel};
use crate::error::{Error, Result};
use crate::imagecore::{polygons_intersect, rasterize_quad, BinaryMask, Point, Polygon, RgbImage, ScalarImage};

pub const PROFILE_SCHEMA_VERSION: u32 = 1;

/// Pixels of context kept around the marker quad when cutting its template.
pub const TEMPLATE_MARGIN_PX: i64 = 6;

pub type ReplicateId = u32;

/// On-disk calibration profile (JSON).
///
/// The user-authored part carries the lens model and the corner coordinates
/// of the replicate and centering tags. `derived` is filled in by the
/// `calibrate` step from a calibration image and is required for analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDocument {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub camera_id: String,
    pub distortion: DistortionModel,
    pub replicates: Vec<ReplicateQuad>,
    pub marker: MarkerSpec,
    pub gray_center: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derived: Option<DerivedCalibration>,
}

fn default_schema_version() -> u32 {
    PROFILE_SCHEMA_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateQuad {
    pub id: ReplicateId,
    pub quad: Polygon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkerSpec {
    pub quad: Polygon,
    #[serde(default = "default_marker_area")]
    pub physical_area_mm2: f64,
}

fn default_marker_area() -> f64 {
    900.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedCalibration {
    pub image_width: usize,
    pub image_height: usize,
    pub marker_pixel_count: usize,
    pub k_conv_mm2_per_px: f64,
    pub marker_ref_center: [f64; 2],
    pub marker_template: TemplateDocument,
}

/// 8-bit luminance template, row-major, base64 encoded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplateDocument {
    pub origin: [i64; 2],
    pub width: usize,
    pub height: usize,
    pub luma_b64: String,
}

impl ProfileDocument {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let doc: ProfileDocument =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if doc.schema_version != PROFILE_SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "{}: unsupported profile schema_version {}",
                path.display(),
                doc.schema_version
            )));
        }
        Ok(doc)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

/// Luminance patch cut around the centering marker in the calibration frame.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkerTemplate {
    /// Top-left pixel of the patch in calibration-frame coordinates.
    pub origin: (i64, i64),
    pub image: ScalarImage,
}

/// Immutable per-camera calibration, shareable across worker threads.
#[derive(Debug, Clone)]
pub struct CalibrationProfile {
    pub camera_id: String,
    pub distortion: DistortionModel,
    pub width: usize,
    pub height: usize,
    pub replicate_quads: BTreeMap<ReplicateId, Polygon>,
    pub replicate_masks: BTreeMap<ReplicateId, BinaryMask>,
    pub marker_quad: Polygon,
    pub marker_physical_area: f64,
    pub marker_pixel_count: usize,
    /// mm^2 of bench surface per pixel.
    pub k_conv: f64,
    pub gray_center: Point,
    pub marker_ref_center: Point,
    pub marker_template: MarkerTemplate,
}

/// mm^2 per pixel from a marker of known physical area.
pub fn conversion_factor(physical_area_mm2: f64, pixel_count: usize) -> Result<f64> {
    if pixel_count == 0 {
        return Err(Error::Config("marker quad covers no pixels".into()));
    }
    if !(physical_area_mm2 > 0.0) {
        return Err(Error::Config(format!(
            "marker physical area must be positive, got {physical_area_mm2}"
        )));
    }
    Ok(physical_area_mm2 / pixel_count as f64)
}

/// Build a profile from the authored quads and a raw calibration frame.
///
/// The frame is undistorted with the document's lens model before the marker
/// template is cut; quads are expected in undistorted coordinates.
pub fn build_profile(doc: &ProfileDocument, raw_calibration_frame: &RgbImage) -> Result<CalibrationProfile> {
    let (w, h) = (raw_calibration_frame.width(), raw_calibration_frame.height());
    doc.distortion.validate(w, h)?;
    let (replicate_quads, replicate_masks) = replicate_layout(doc, w, h)?;

    let marker_mask = rasterize_quad(&doc.marker.quad, w, h)?;
    let marker_pixel_count = marker_mask.count();
    let k_conv = conversion_factor(doc.marker.physical_area_mm2, marker_pixel_count)?;

    let frame = undistort_frame(raw_calibration_frame, &doc.distortion);
    let luma = frame.luminance();
    let bb = doc.marker.quad.bbox();
    let x0 = bb.min_x.floor() as i64 - TEMPLATE_MARGIN_PX;
    let y0 = bb.min_y.floor() as i64 - TEMPLATE_MARGIN_PX;
    let x1 = bb.max_x.ceil() as i64 + TEMPLATE_MARGIN_PX;
    let y1 = bb.max_y.ceil() as i64 + TEMPLATE_MARGIN_PX;
    let mut template = luma
        .crop(x0, y0, (x1 - x0) as usize, (y1 - y0) as usize)
        .ok_or_else(|| Error::Config("marker template window leaves the calibration frame".into()))?;
    // stored as 8-bit on disk; quantize here so both paths match
    for v in template.values_mut() {
        *v = v.clamp(0.0, 255.0).round();
    }

    let gray_center = Point::from(doc.gray_center);
    let marker_ref_center = doc.marker.quad.centroid();
    for (name, p) in [("gray_center", gray_center), ("marker center", marker_ref_center)] {
        check_inside(name, p, w, h)?;
    }

    Ok(CalibrationProfile {
        camera_id: doc.camera_id.clone(),
        distortion: doc.distortion,
        width: w,
        height: h,
        replicate_quads,
        replicate_masks,
        marker_quad: doc.marker.quad.clone(),
        marker_physical_area: doc.marker.physical_area_mm2,
        marker_pixel_count,
        k_conv,
        gray_center,
        marker_ref_center,
        marker_template: MarkerTemplate {
            origin: (x0, y0),
            image: template,
        },
    })
}

fn check_inside(name: &str, p: Point, w: usize, h: usize) -> Result<()> {
    if p.x < 0.0 || p.y < 0.0 || p.x > w as f64 || p.y > h as f64 {
        return Err(Error::Config(format!(
            "{name} ({}, {}) outside the {w}x{h} image",
            p.x, p.y
        )));
    }
    Ok(())
}

type Layout = (BTreeMap<ReplicateId, Polygon>, BTreeMap<ReplicateId, BinaryMask>);

fn replicate_layout(doc: &ProfileDocument, w: usize, h: usize) -> Result<Layout> {
    let mut quads = BTreeMap::new();
    for rep in &doc.replicates {
        if quads.insert(rep.id, rep.quad.clone()).is_some() {
            return Err(Error::Config(format!("duplicate replicate id {}", rep.id)));
        }
    }
    if quads.is_empty() {
        return Err(Error::Config(format!("camera {} has no replicates", doc.camera_id)));
    }
    let ids: Vec<_> = quads.keys().copied().collect();
    for (i, a) in ids.iter().enumerate() {
        for b in &ids[i + 1..] {
            if polygons_intersect(&quads[a], &quads[b]) {
                return Err(Error::Config(format!("replicate quads {a} and {b} overlap")));
            }
        }
    }
    let mut masks = BTreeMap::new();
    for (&id, quad) in &quads {
        let m = rasterize_quad(quad, w, h)?;
        if m.count() == 0 {
            return Err(Error::Config(format!("replicate {id} covers no pixels")));
        }
        masks.insert(id, m);
    }
    Ok((quads, masks))
}

impl CalibrationProfile {
    /// Reconstruct from a document that already carries its derived section.
    pub fn from_document(doc: &ProfileDocument) -> Result<Self> {
        let d = doc.derived.as_ref().ok_or_else(|| {
            Error::Config(format!(
                "profile for camera {} has no derived calibration; run `calibrate` first",
                doc.camera_id
            ))
        })?;
        doc.distortion.validate(d.image_width, d.image_height)?;
        let (replicate_quads, replicate_masks) = replicate_layout(doc, d.image_width, d.image_height)?;
        let t = &d.marker_template;
        let bytes = base64::engine::general_purpose::STANDARD
            .decode(&t.luma_b64)
            .map_err(|e| Error::Config(format!("marker template: {e}")))?;
        let image = ScalarImage::from_vec(t.width, t.height, bytes.into_iter().map(f32::from).collect())
            .map_err(|e| Error::Config(format!("marker template: {e}")))?;
        if !(d.k_conv_mm2_per_px > 0.0) {
            return Err(Error::Config("k_conv must be positive".into()));
        }
        Ok(Self {
            camera_id: doc.camera_id.clone(),
            distortion: doc.distortion,
            width: d.image_width,
            height: d.image_height,
            replicate_quads,
            replicate_masks,
            marker_quad: doc.marker.quad.clone(),
            marker_physical_area: doc.marker.physical_area_mm2,
            marker_pixel_count: d.marker_pixel_count,
            k_conv: d.k_conv_mm2_per_px,
            gray_center: Point::from(doc.gray_center),
            marker_ref_center: Point::from(d.marker_ref_center),
            marker_template: MarkerTemplate {
                origin: (t.origin[0], t.origin[1]),
                image,
            },
        })
    }

    /// Serializable form, including the derived section. The template is
    /// quantized to 8 bits.
    pub fn to_document(&self) -> ProfileDocument {
        let t = &self.marker_template;
        let bytes: Vec<u8> = t
            .image
            .values()
            .iter()
            .map(|v| v.clamp(0.0, 255.0).round() as u8)
            .collect();
        ProfileDocument {
            schema_version: PROFILE_SCHEMA_VERSION,
            camera_id: self.camera_id.clone(),
            distortion: self.distortion,
            replicates: self
                .replicate_quads
                .iter()
                .map(|(&id, q)| ReplicateQuad { id, quad: q.clone() })
                .collect(),
            marker: MarkerSpec {
                quad: self.marker_quad.clone(),
                physical_area_mm2: self.marker_physical_area,
            },
            gray_center: self.gray_center.into(),
            derived: Some(DerivedCalibration {
                image_width: self.width,
                image_height: self.height,
                marker_pixel_count: self.marker_pixel_count,
                k_conv_mm2_per_px: self.k_conv,
                marker_ref_center: self.marker_ref_center.into(),
                marker_template: TemplateDocument {
                    origin: [t.origin.0, t.origin.1],
                    width: t.image.width(),
                    height: t.image.height(),
                    luma_b64: base64::engine::general_purpose::STANDARD.encode(bytes),
                },
            }),
        }
    }

    /// Side of one pixel in mm.
    pub fn pixel_side_mm(&self) -> f64 {
        self.k_conv.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc() -> ProfileDocument {
        ProfileDocument {
            schema_version: 1,
            camera_id: "cam1".into(),
            distortion: DistortionModel::identity(200, 160),
            replicates: vec![
                ReplicateQuad {
                    id: 1,
                    quad: Polygon::rect(5., 5., 80., 80.).unwrap(),
                },
                ReplicateQuad {
                    id: 2,
                    quad: Polygon::rect(120., 5., 195., 80.).unwrap(),
                },
            ],
            marker: MarkerSpec {
                quad: Polygon::rect(90., 100., 110., 120.).unwrap(),
                physical_area_mm2: 900.0,
            },
            gray_center: [100.0, 40.0],
            derived: None,
        }
    }

    fn frame() -> RgbImage {
        RgbImage::from_fn(200, 160, |x, y| {
            let v = if (90..110).contains(&x) && (100..120).contains(&y) {
                if (x / 4 + y / 4) % 2 == 0 {
                    20.0
                } else {
                    230.0
                }
            } else {
                120.0
            };
            [v, v, v]
        })
        .unwrap()
    }

    #[test]
    fn conversion_factor_matches_reference_cameras() {
        let k = conversion_factor(900.0, 4615).unwrap();
        assert!((k - 0.195).abs() < 5e-4, "{k}");
        let k2 = conversion_factor(900.0, 4639).unwrap();
        assert!((k2 - 0.194).abs() < 5e-4, "{k2}");
        // the reference table rounds area and side independently
        assert!((k.sqrt() - 0.441).abs() < 1e-3);
        assert!(conversion_factor(900.0, 0).is_err());
    }

    #[test]
    fn builds_masks_and_k_conv() {
        let p = build_profile(&doc(), &frame()).unwrap();
        assert_eq!(p.marker_pixel_count, 400);
        assert_eq!(p.k_conv, 900.0 / 400.0);
        assert_eq!(p.replicate_masks[&1].count(), 75 * 75);
        assert!(p.replicate_masks[&1].is_disjoint(&p.replicate_masks[&2]).unwrap());
        assert_eq!(p.marker_template.origin, (84, 94));
        assert_eq!(p.marker_template.image.width(), 32);
        assert_eq!(p.marker_ref_center, Point::new(100.0, 110.0));
    }

    #[test]
    fn overlapping_replicates_rejected() {
        let mut d = doc();
        d.replicates[1].quad = Polygon::rect(70., 5., 150., 80.).unwrap();
        assert!(matches!(build_profile(&d, &frame()), Err(Error::Config(_))));
    }

    #[test]
    fn gray_center_outside_rejected() {
        let mut d = doc();
        d.gray_center = [500.0, 10.0];
        assert!(matches!(build_profile(&d, &frame()), Err(Error::Config(_))));
    }

    #[test]
    fn document_round_trip() {
        let p = build_profile(&doc(), &frame()).unwrap();
        let d = p.to_document();
        let text = serde_json::to_string(&d).unwrap();
        let back: ProfileDocument = serde_json::from_str(&text).unwrap();
        let q = CalibrationProfile::from_document(&back).unwrap();
        assert_eq!(q.k_conv, p.k_conv);
        assert_eq!(q.marker_template, p.marker_template);
        assert_eq!(q.replicate_masks, p.replicate_masks);
    }

    #[test]
    fn missing_derived_is_config_error() {
        assert!(matches!(
            CalibrationProfile::from_document(&doc()),
            Err(Error::Config(_))
        ));
    }
}
