use serde::{Deserialize, Serialize};

/// Variance tag of a tensor field; selects the Lie-derivative rule.
///
/// Matrix kinds store d×d components row-major; the tag (not the storage)
/// decides whether a slot is tangent or cotangent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    /// 0-form f
    IntensiveScalar,
    /// volume form ρ
    ExtensiveScalar,
    /// tangent vector w
    Vector,
    /// 1-form β
    Covector,
    /// momentum density π
    Momentum,
    /// 𝔹 : T → T
    OpVV,
    /// ℂ : T → T*
    OpVC,
    /// 𝔻 : T* → T*
    OpCC,
    /// 𝔼 : T* → T
    OpCV,
    /// deformation gradient F
    TwoPoint,
    /// plastic distortion F_p
    IntensiveMatrix,
    /// ℝ^d-valued density M
    RdExtensive,
}

impl Kind {
    pub const ALL: [Kind; 12] = [
        Kind::IntensiveScalar,
        Kind::ExtensiveScalar,
        Kind::Vector,
        Kind::Covector,
        Kind::Momentum,
        Kind::OpVV,
        Kind::OpVC,
        Kind::OpCC,
        Kind::OpCV,
        Kind::TwoPoint,
        Kind::IntensiveMatrix,
        Kind::RdExtensive,
    ];

    pub fn rank(self) -> usize {
        match self {
            Kind::IntensiveScalar | Kind::ExtensiveScalar => 0,
            Kind::Vector | Kind::Covector | Kind::Momentum | Kind::RdExtensive => 1,
            _ => 2,
        }
    }

    pub fn components(self, dim: usize) -> usize {
        dim.pow(self.rank() as u32)
    }

    pub fn is_scalar(self) -> bool {
        self.rank() == 0
    }

    pub fn is_vector_like(self) -> bool {
        self.rank() == 1
    }

    pub fn is_matrix(self) -> bool {
        self.rank() == 2
    }

    /// One-byte tag used by the snapshot format.
    pub fn tag(self) -> u8 {
        Kind::ALL.iter().position(|&k| k == self).unwrap() as u8
    }

    pub fn from_tag(tag: u8) -> Option<Kind> {
        Kind::ALL.get(tag as usize).copied()
    }

    /// (vector slots, covector slots) of the multilinear form this kind is
    /// identified with, for the kinds that are plain tensors.
    pub fn signature(self) -> Option<(usize, usize)> {
        match self {
            Kind::IntensiveScalar => Some((0, 0)),
            Kind::Vector => Some((0, 1)),
            Kind::Covector => Some((1, 0)),
            Kind::OpVV | Kind::OpCC => Some((1, 1)),
            Kind::OpVC => Some((2, 0)),
            Kind::OpCV => Some((0, 2)),
            _ => None,
        }
    }
}
