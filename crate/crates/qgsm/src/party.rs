use serde::{Deserialize, Serialize};

/// The parties that can take part in a session.
///
/// `Sep` is the source of entangled particles, `Sim1` the original SIM card,
/// `Sim2` its copy (present only in clone scenarios), `Auc` the network's
/// authentication center and `Eve` an interposed eavesdropper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    #[serde(rename = "SEP")]
    Sep,
    #[serde(rename = "SIM1")]
    Sim1,
    #[serde(rename = "SIM2")]
    Sim2,
    #[serde(rename = "AUC")]
    Auc,
    #[serde(rename = "EVE")]
    Eve,
}

impl Role {
    /// Stable numeric id, used when deriving per-party RNG streams.
    pub fn stream_id(self) -> u64 {
        match self {
            Role::Sep => 1,
            Role::Sim1 => 2,
            Role::Sim2 => 3,
            Role::Auc => 4,
            Role::Eve => 5,
        }
    }
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Role::Sep => "SEP",
            Role::Sim1 => "SIM1",
            Role::Sim2 => "SIM2",
            Role::Auc => "AUC",
            Role::Eve => "EVE",
        };
        f.write_str(s)
    }
}
