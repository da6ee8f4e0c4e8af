//! Named sweeps that regenerate each figure's data in one command.

pub const PRESET_NAMES: [&str; 9] = [
    "fig2",
    "fig3_low_reg",
    "fig3_high_reg",
    "fig5",
    "fig_ens_vs_over",
    "fig_ens_vs_reg",
    "figA_scalings",
    "figA_divide",
    "figA_under_over",
];

/// Term-by-term traces against finite-size estimates at D = 200.
const FIG2: &str = r#"
mode = "compare"
seeds = [2024]

[grid]
psi1 = [0.2, 0.5, 0.8, 1.5, 2.0, 5.0]
lambda = [1e-5, 1e-2]

[fixed]
psi2 = 1.0
D = 200
n_runs = 20
target = "psi"
"#;

const FIG3_LOW_REG: &str = r#"
mode = "theory"

[grid]
psi1 = { logspace = [0.1, 10.0, 50] }

[fixed]
lambda = 1e-5
psi2 = 1.0
snr = 1.0
"#;

const FIG3_HIGH_REG: &str = r#"
mode = "theory"

[grid]
psi1 = { logspace = [0.1, 10.0, 50] }

[fixed]
lambda = 1e-1
psi2 = 1.0
snr = 1.0
"#;

/// Ensembles of true random-features models against theory, 10 runs each.
const FIG5: &str = r#"
mode = "compare"
seeds = [5]

[grid]
psi1 = { logspace = [0.1, 10.0, 25] }
K = [1, 2, 10]

[fixed]
lambda = 1e-5
psi2 = 1.0
snr = 10.0
D = 200
n_runs = 10
n_test = 10000
model = "true_rf"
target = "error"
"#;

const FIG_ENS_VS_OVER: &str = r#"
mode = "theory"

[grid]
psi1 = [0.5, 5.0]
psi2 = { logspace = [0.1, 10.0, 40] }

[fixed]
K = 2
lambda = 1e-5
snr = 10.0
extras = ["double_p"]
"#;

const FIG_ENS_VS_REG: &str = r#"
mode = "theory"

[grid]
psi1 = { logspace = [0.1, 10.0, 30] }

[fixed]
K = inf
lambda = 1e-5
psi2 = 1.0
snr = 10.0
extras = ["optimal_lambda"]
"#;

const FIGA_SCALINGS: &str = r#"
mode = "theory"

[grid]
psi1 = [
    1.01, 1.01291549665, 1.016681005372, 1.0215443469, 1.027825594022,
    1.035938136638, 1.046415888336, 1.059948425032, 1.077426368268, 1.1,
    10.0, 12.915496650149, 16.681005372001, 21.544346900319, 27.825594022071,
    35.938136638046, 46.415888336128, 59.948425031894, 77.426368268113, 100.0,
]

[fixed]
lambda = 1e-5
psi2 = 1.0
snr = 1.0
"#;

const FIGA_DIVIDE: &str = r#"
mode = "theory"

[grid]
psi1 = { logspace = [0.1, 10.0, 30] }
snr = [10.0, 1.0]

[fixed]
K = 2
lambda = 1e-5
psi2 = 1.0
extras = ["divide"]
"#;

const FIGA_UNDER_OVER: &str = r#"
mode = "theory"

[grid]
ratio = { logspace = [0.1, 10.0, 30] }
psi2 = [0.5, 1.0, 2.0]
K = [1, 2, 10, inf]
snr = [1.0, 10.0]

[fixed]
lambda = 1e-5
"#;

/// Config text of a named preset.
pub fn preset(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig2" => FIG2,
        "fig3_low_reg" => FIG3_LOW_REG,
        "fig3_high_reg" => FIG3_HIGH_REG,
        "fig5" => FIG5,
        "fig_ens_vs_over" => FIG_ENS_VS_OVER,
        "fig_ens_vs_reg" => FIG_ENS_VS_REG,
        "figA_scalings" => FIGA_SCALINGS,
        "figA_divide" => FIGA_DIVIDE,
        "figA_under_over" => FIGA_UNDER_OVER,
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_config;

    #[test]
    fn every_preset_parses() {
        for name in PRESET_NAMES {
            let spec = parse_config(preset(name).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(spec.n_rows() > 0, "{name}");
        }
        assert!(preset("nope").is_none());
    }
}
