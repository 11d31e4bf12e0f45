//! Built-in parameter sets, written in the parameter-file format.
//!
//! Couplings are pinned where known and otherwise derived from the
//! circuit block. Rates use the angular convention of [`crate::quantity`].

use crate::config::ParamFile;
use crate::error::CliError;

const CIRCUIT: &str = r#"
e_j = "10 Grad/s"
v_g = "10 V"
c = "50 fF"
impedance_ratio = 0.01
g_m_per_ec = 0.025
"#;

const WEAK_DRIVE: &str = r#"
omega_c = "5 GHz"
omega_m = "10 MHz"
kappa = "0.01 omega_m"
gamma = "0.001 omega_m"
omega_drive = "0.001 omega_m"
n_th = 0
n_a = 4
n_m = 12
"#;

const BLOCKADE_A: &str = r#"
g0 = "-9 Mrad/s"
g_ck = "5.4 Mrad/s"
g_ck_prime = "0.9 Mrad/s"
"#;

const BLOCKADE_B: &str = r#"
g0 = "-10.7 Mrad/s"
g_ck = "9.63 Mrad/s"
g_ck_prime = "4.28 Mrad/s"
"#;

const CAT: &str = r#"
omega_c = "5 GHz"
omega_m = "10 MHz"
g0 = "0 Mrad/s"
g_ck = "-2.7 Mrad/s"
g_ck_prime = "0.2 Mrad/s"
xi = 4
k = 2
n = 1
n_m = 60
"#;

const STRONG_DRIVE: &str = r#"
omega_c = "10 GHz"
omega_m = "50 MHz"
power = "-50 dBm"
kappa = "1 Mrad/s"
gamma = "500 krad/s"
n_th = 0.5
"#;

const DETUNING_SWEEP: &str = r#"delta_c=-1.5:0.5:201 omega_m"#;
const MAP_SWEEPS: [&str; 2] = ["delta_ng0=0.5:0.56:61", "delta_c=-1.5:0.5:101 omega_m"];
const STRONG_SWEEP: &str = r#"delta_c=0:20:401 omega_m"#;

pub struct Preset {
    pub name: &'static str,
    pub about: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset { name: "fig2", about: "couplings versus gate charge for several E_J/E_C" },
    Preset { name: "fig4a", about: "g2 map over detuning and gate charge, E_J/E_C = 1/20" },
    Preset { name: "fig4b", about: "g2 map over detuning and gate charge, E_J/E_C = 1/30" },
    Preset { name: "fig5a", about: "g2 versus detuning, pinned couplings at gate charge 0.533" },
    Preset { name: "fig5b", about: "g2 versus detuning, pinned couplings at gate charge 0.527" },
    Preset { name: "fig6a", about: "fig5a with and without g'_CK" },
    Preset { name: "fig6b", about: "fig5b with and without g'_CK" },
    Preset { name: "fig7a", about: "statistics classes over detuning and gate charge, E_J/E_C = 1/20" },
    Preset { name: "fig7b", about: "statistics classes over detuning and gate charge, E_J/E_C = 1/30" },
    Preset { name: "fig8a", about: "g2 and g3 versus thermal occupation, fig5a couplings" },
    Preset { name: "fig8b", about: "g2 and g3 versus thermal occupation, fig5b couplings" },
    Preset { name: "fig9", about: "Wigner snapshots of cat generation, xi = 4" },
    Preset { name: "fig10", about: "Wigner negativity with dissipation, two cavity decay rates" },
    Preset { name: "fig11a", about: "log negativity over detuning and gate charge, E_J/E_C = 1/4" },
    Preset { name: "fig11b", about: "log negativity over detuning and gate charge, E_J/E_C = 1/5" },
    Preset { name: "fig12a", about: "omega_eff/Delta_eff and stability, E_J/E_C = 1/4, gate charge 0.539" },
    Preset { name: "fig12b", about: "omega_eff/Delta_eff and stability, E_J/E_C = 1/5, gate charge 0.528" },
    Preset { name: "fig13a", about: "log negativity with and without g'_CK, fig12a point" },
    Preset { name: "fig13b", about: "log negativity with and without g'_CK, fig12b point" },
];

fn text(name: &str) -> Option<(String, Vec<&'static str>)> {
    let circuit = |ratio: &str, rest: &str| format!("{CIRCUIT}ratio_ej_ec = \"{ratio}\"\n{rest}");
    let strong = |ratio: &str, dn: &str| circuit(ratio, &format!("{STRONG_DRIVE}delta_ng0 = {dn}\n"));
    Some(match name {
        "fig2" => (
            circuit("1/20", "omega_c = \"5 GHz\"\nomega_m = \"10 MHz\"\ndelta_ng0 = 0.5\n"),
            vec!["ratio_ej_ec=1/4,1/5,1/20,1/30", "delta_ng0=0.45:0.56:200"],
        ),
        "fig4a" | "fig7a" => (circuit("1/20", WEAK_DRIVE) + "delta_ng0 = 0.533\n", MAP_SWEEPS.to_vec()),
        "fig4b" | "fig7b" => (circuit("1/30", WEAK_DRIVE) + "delta_ng0 = 0.527\n", MAP_SWEEPS.to_vec()),
        "fig5a" => (format!("{WEAK_DRIVE}{BLOCKADE_A}"), vec![DETUNING_SWEEP]),
        "fig5b" => (format!("{WEAK_DRIVE}{BLOCKADE_B}"), vec![DETUNING_SWEEP]),
        "fig6a" => (format!("{WEAK_DRIVE}{BLOCKADE_A}"), vec!["g_ck_prime_scale=0,1", DETUNING_SWEEP]),
        "fig6b" => (format!("{WEAK_DRIVE}{BLOCKADE_B}"), vec!["g_ck_prime_scale=0,1", DETUNING_SWEEP]),
        "fig8a" => (format!("{WEAK_DRIVE}{BLOCKADE_A}delta_c = \"0 omega_m\"\n"), vec!["n_th=0:4:41"]),
        "fig8b" => (format!("{WEAK_DRIVE}{BLOCKADE_B}delta_c = \"0 omega_m\"\n"), vec!["n_th=0:4:41"]),
        "fig9" => (format!("{CAT}t_steps = 4\n"), vec![]),
        "fig10" => (
            format!("{CAT}gamma = \"10 krad/s\"\nkappa = \"10 krad/s\"\nn_th = 0\nt_stop_tau = 2\nt_steps = 81\n"),
            vec!["kappa=10,100 krad/s"],
        ),
        "fig11a" => (strong("1/4", "0.539"), vec!["delta_ng0=0.5:0.56:61", "delta_c=0:20:201 omega_m"]),
        "fig11b" => (strong("1/5", "0.528"), vec!["delta_ng0=0.5:0.56:61", "delta_c=0:20:201 omega_m"]),
        "fig12a" => (strong("1/4", "0.539"), vec![STRONG_SWEEP]),
        "fig12b" => (strong("1/5", "0.528"), vec![STRONG_SWEEP]),
        "fig13a" => (strong("1/4", "0.539"), vec!["g_ck_prime_scale=0,1", STRONG_SWEEP]),
        "fig13b" => (strong("1/5", "0.528"), vec!["g_ck_prime_scale=0,1", STRONG_SWEEP]),
        _ => return None,
    })
}

pub fn load(name: &str) -> Result<ParamFile, CliError> {
    let (body, sweeps) = text(name).ok_or_else(|| {
        let names: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
        CliError::Config(format!("unknown preset `{name}`; available: {}", names.join(", ")))
    })?;
    let mut file = ParamFile::parse(&format!("[params]\n{body}"), false)?;
    file.sweep = sweeps.into_iter().map(String::from).collect();
    Ok(file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Values;

    #[test]
    fn every_preset_parses() {
        for p in PRESETS {
            let file = load(p.name).unwrap();
            Values::parse(&file.params).unwrap_or_else(|e| panic!("{}: {e}", p.name));
            for s in &file.sweep {
                crate::sweep::Sweep::parse(s).unwrap_or_else(|e| panic!("{}: {e}", p.name));
            }
        }
    }

    #[test]
    fn unknown_preset() {
        assert!(load("fig99").is_err());
    }
}
