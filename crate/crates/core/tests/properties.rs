mod common;

use proptest::prelude::*;

use common::*;

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(CASES) })]

    #[test]
    fn operator_a_is_monotone(case in monotonicity_case()) {
        check_monotonicity(case)?;
    }

    #[test]
    fn kernels_are_normalized(case in kernel_case()) {
        check_normalization(case)?;
    }

    #[test]
    fn discrete_mgf_matches_closed_form(case in mgf_case()) {
        check_mgf(case)?;
    }

    #[test]
    fn shift_align_is_translation_equivariant(case in align_case()) {
        check_align(case)?;
    }

    #[test]
    fn simulator_keeps_equilibria(case in equilibrium_case()) {
        check_equilibrium(case)?;
    }
}

mod verdicts {
    use proptest::prelude::*;
    use wavefront_lab::spectral::classify;
    use wavefront_lab::{KernelFamily, KernelSpec, ModelParams};

    proptest! {
        #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(100) })]

        // thresholds are single crossings in tau, so a sufficient verdict
        // at a larger delay carries over to every smaller one
        #[test]
        fn sufficient_verdict_is_monotone_in_tau(
            strong in any::<bool>(),
            gamma in 0.1f64..5.0,
            c in 2.0f64..6.0,
            t2 in 0.05f64..2.0,
            ratio in 0.01f64..1.0,
        ) {
            let fam = if strong { KernelFamily::NonlocalStrongGeneric } else { KernelFamily::NonlocalWeakGeneric };
            let p = ModelParams::new(c, gamma, 1.0).unwrap();
            let hi = classify(&KernelSpec::new(fam, t2).unwrap(), &p).unwrap();
            let lo = classify(&KernelSpec::new(fam, t2 * ratio).unwrap(), &p).unwrap();
            prop_assert!(!hi.sufficient_holds || lo.sufficient_holds);
        }
    }
}
