//! Conjugates, shifts and Simonenko-type indices of the built-in N-functions.

use orlicz_stokes::nfunc::{
    estimate_indices, shift, verify_structural_inequalities, Conjugate, NFunction, NFunctionModel, SampleSpec,
};

fn main() -> orlicz_stokes::Result<()> {
    let models = [
        NFunctionModel::power_law(1.0, 0.0, 1.5)?,
        NFunctionModel::power_law_quadratic(1.0, 1.0, 3.0)?,
        NFunctionModel::carreau(0.5, 1.0, 1.0, 1.5)?,
        NFunctionModel::arcsinh(1.0, 1.0)?,
    ];
    for m in &models {
        println!("{m}");
        let conj = Conjugate(*m);
        for t in [0.1, 1.0, 10.0] {
            let s = m.phi_prime(t)?;
            // Fenchel equality phi(t) + phi*(phi'(t)) = t phi'(t)
            let gap = m.phi(t)? + conj.phi(s)? - t * s;
            println!(
                "  t={t:<5} phi={:.6e} phi'={:.6e} phi*(phi')={:.6e} fenchel gap={gap:.1e} (phi*)'(phi')={:.6}",
                m.phi(t)?,
                s,
                conj.phi(s)?,
                conj.phi_prime(s)?
            );
        }
        let a = 2.0;
        let sh = shift(*m, a)?;
        println!("  shifted by a={a}: phi_a(1)={:.6e}, phi_a'(1)={:.6e}", sh.phi(1.0)?, sh.phi_prime(1.0)?);
        let ix = estimate_indices(m)?;
        println!("  indices p={:.4} q={:.4} K1={:.4}", ix.p_lower, ix.q_upper, ix.k1);
        let rep = verify_structural_inequalities(m, &SampleSpec::default())?;
        println!(
            "  phi/(t phi') in [{:.4}, {:.4}], structural checks {}",
            rep.phi_vs_t_phi_prime.min,
            rep.phi_vs_t_phi_prime.max,
            if rep.pass { "pass" } else { "FAIL" }
        );
    }
    Ok(())
}
