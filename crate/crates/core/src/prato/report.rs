use serde::Serialize;

use crate::crossedmod::Cover;
use crate::exact::Scalar;
use crate::polytope::{affine_dimension, is_bounded, is_simple, redundant_facets, vertices};

use super::analysis::{
    classify, hypotheses_report, reduction_exists, regular_value_check, ClassReport, HypothesesReport,
    RegularValueReport, ReductionVerdict,
};
use super::image::{moment_image, MomentImageReport, SamplingConfig};
use super::{build_prato_data, DataSummary, PratoError, StackyPolytope, ValidityReport};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplicityReport {
    pub bounded: bool,
    pub simple: Option<bool>,
    pub redundant_facets: Option<Vec<usize>>,
    pub vertex_count: Option<usize>,
    pub dimension: Option<usize>,
}

/// Everything the pipeline can say about one stacky polytope. Analyses
/// that need a bounded polytope or a regular value are skipped otherwise,
/// and each skip is listed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub schema: &'static str,
    pub config: SamplingConfig,
    pub validity: ValidityReport,
    pub data: DataSummary,
    pub simplicity: SimplicityReport,
    pub regularity: Option<RegularValueReport>,
    pub hypotheses: HypothesesReport,
    pub classification: Option<String>,
    pub classification_certificate: Option<ClassReport>,
    pub reduction: Option<String>,
    pub reduction_verdict: Option<ReductionVerdict>,
    pub image: Option<String>,
    pub moment_image: Option<MomentImageReport>,
    /// Dimension of a full reduction at an interior level.
    pub reduced_dim: usize,
    pub skipped: Vec<String>,
}

pub fn analyze(s: &StackyPolytope, cover: Option<Cover>, cfg: &SamplingConfig) -> Result<AnalysisReport, PratoError> {
    let validity = s.validate();
    let d = build_prato_data(s, cover)?;
    let p = &s.polytope;
    let bounded = is_bounded(p)?;
    let mut skipped = Vec::new();
    let simplicity = if bounded {
        let verts = vertices(p)?;
        let pts: Vec<Vec<Scalar>> = verts.iter().map(|v| v.point.clone()).collect();
        SimplicityReport {
            bounded,
            simple: Some(is_simple(p)?),
            redundant_facets: Some(redundant_facets(p)?),
            vertex_count: Some(verts.len()),
            dimension: affine_dimension(&pts),
        }
    } else {
        SimplicityReport { bounded, simple: None, redundant_facets: None, vertex_count: None, dimension: None }
    };
    let hypotheses = hypotheses_report(&d, s)?;
    let (mut regularity, mut class, mut reduction, mut image) = (None, None, None, None);
    if bounded {
        let reg = regular_value_check(&d, p)?;
        let regular = reg.regular;
        regularity = Some(reg);
        class = Some(classify(&d, s)?);
        image = Some(moment_image(&d, p, cfg)?);
        if regular {
            reduction = Some(reduction_exists(&d, s)?);
        } else {
            skipped.push("reduction: 0 is not a regular value".into());
        }
    } else {
        skipped.extend(
            ["regularity", "classification", "reduction", "moment image"].map(|a| format!("{a}: polytope is unbounded")),
        );
    }
    Ok(AnalysisReport {
        schema: "stacky-moment/1",
        config: cfg.clone(),
        validity,
        data: d.summary(),
        simplicity,
        regularity,
        hypotheses,
        classification: class.as_ref().map(|c| c.kind.to_string()),
        classification_certificate: class,
        reduction: reduction.as_ref().map(|r| if r.exists { "exists" } else { "fails" }.to_string()),
        reduction_verdict: reduction,
        image: image.as_ref().map(|m| m.summary.clone()),
        moment_image: image,
        reduced_dim: 0,
        skipped,
    })
}
