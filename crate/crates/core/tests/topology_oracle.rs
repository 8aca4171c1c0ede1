use proptest::prelude::*;
use ripplemod_core::topology::nodal::nodal_oracle;
use ripplemod_core::topology::{
    enumerate_string_states, solve_current_distribution, InterconnectResistances, ModuleElectrical,
    ModuleLabel, StringState,
};

fn modules_strategy(n: usize) -> impl Strategy<Value = Vec<ModuleElectrical>> {
    prop::collection::vec(
        (22.4..22.6f64, 0.001..0.1f64, 0.001..0.1f64, 0.001..0.1f64),
        n,
    )
    .prop_map(|v| {
        v.into_iter()
            .map(|(voltage, r_b, r_ls, r_hs)| ModuleElectrical {
                voltage,
                resistances: InterconnectResistances { r_b, r_ls, r_hs },
            })
            .collect()
    })
}

fn relative_gap(a: &[f64], b: &[f64], phase_current: f64) -> f64 {
    let scale = a
        .iter()
        .chain(b)
        .fold(phase_current.abs(), |m, v| m.max(v.abs()))
        .max(1e-30);
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn solver_matches_nodal_oracle(
        modules in modules_strategy(5),
        pick in 0usize..1706,
        phase_current in -40.0..40.0f64,
    ) {
        let space = enumerate_string_states(5, None).unwrap();
        let state = space.get(pick);
        let fast = solve_current_distribution(state, &modules, phase_current).unwrap();
        let oracle = nodal_oracle(state, &modules, phase_current).unwrap();
        prop_assert!(relative_gap(&fast.currents, &oracle.currents, phase_current) <= 1e-9,
            "{state}: {:?} vs {:?}", fast.currents, oracle.currents);
    }

    #[test]
    fn groups_conserve_phase_current(
        modules in modules_strategy(5),
        pick in 0usize..1706,
        phase_current in -40.0..40.0f64,
    ) {
        let space = enumerate_string_states(5, None).unwrap();
        let state = space.get(pick);
        let d = solve_current_distribution(state, &modules, phase_current).unwrap();
        for g in state.groups() {
            let sum: f64 = d.currents[g.members()].iter().sum();
            let want = f64::from(g.polarity) * phase_current;
            prop_assert!((sum - want).abs() <= 1e-12 * phase_current.abs().max(1.0));
            if g.polarity == 0 {
                prop_assert!(d.currents[g.members()].iter().all(|&i| i == 0.0));
            }
        }
    }

    #[test]
    fn equal_parameters_split_evenly_without_links(
        n in 1usize..=5,
        r_b in 0.001..0.1f64,
        phase_current in 0.5..40.0f64,
    ) {
        // Negligible links: only the battery branches matter, so the split is
        // forced to be exactly even.
        let m = ModuleElectrical {
            voltage: 22.5,
            resistances: InterconnectResistances { r_b, r_ls: 1e-9 * r_b, r_hs: 1e-9 * r_b },
        };
        let mut labels = vec![ModuleLabel::SeriesPlus];
        labels.extend(std::iter::repeat_n(ModuleLabel::Parallel, n - 1));
        let state = StringState::new(labels).unwrap();
        let d = solve_current_distribution(&state, &vec![m; n], phase_current).unwrap();
        for i in d.currents {
            prop_assert!((i / phase_current - 1.0 / n as f64).abs() < 1e-7);
        }
    }

    #[test]
    fn raising_a_voltage_never_lowers_that_share(
        modules in modules_strategy(4),
        who in 0usize..4,
        bump in 0.0..0.2f64,
        phase_current in 0.5..30.0f64,
    ) {
        let state: StringState = "S+ P P P".parse().unwrap();
        let before = nodal_oracle(&state, &modules, phase_current).unwrap();
        let mut raised = modules.clone();
        raised[who].voltage += bump;
        let after = nodal_oracle(&state, &raised, phase_current).unwrap();
        prop_assert!(after.currents[who] >= before.currents[who] - 1e-9);
        let fast = solve_current_distribution(&state, &raised, phase_current).unwrap();
        prop_assert!(fast.currents[who] >= before.currents[who] - 1e-9);
    }
}

#[test]
fn pair_with_voltage_spread_matches_oracle() {
    let mk = |v| ModuleElectrical {
        voltage: v,
        resistances: InterconnectResistances {
            r_b: 0.02,
            r_ls: 0.002,
            r_hs: 0.002,
        },
    };
    let modules = [mk(22.5), mk(22.6)];
    let state: StringState = "S+ P".parse().unwrap();
    let fast = solve_current_distribution(&state, &modules, 10.0).unwrap();
    let oracle = nodal_oracle(&state, &modules, 10.0).unwrap();
    // Loop through both batteries and both links, with i2 = 10 - i1:
    // 22.6 - 0.02*(10 - i1) = 22.5 - 0.022*i1 + 0.002*(10 - i1)
    let i1 = (0.02 * 10.0 + 0.002 * 10.0 - 0.1) / (0.02 + 0.002 + 0.002 + 0.02);
    assert!((fast.currents[0] - i1).abs() < 1e-12);
    assert!(relative_gap(&fast.currents, &oracle.currents, 10.0) <= 1e-9);
    assert!(fast.currents[1] > fast.currents[0]);
}

/// The lower-triangle coefficients printed with the index of the previous
/// link only agree with the network when all links are equal.
#[test]
fn previous_link_indexing_disagrees_with_network_for_unequal_links() {
    use ripplemod_core::linalg::solve;
    let modules: Vec<ModuleElectrical> = [0.002, 0.004, 0.008, 0.016]
        .iter()
        .map(|&r| ModuleElectrical {
            voltage: 22.5,
            resistances: InterconnectResistances {
                r_b: 0.02,
                r_ls: r,
                r_hs: r,
            },
        })
        .collect();
    let n = modules.len();
    let current = 10.0;
    let mut a = vec![0.0; n * n];
    let mut b = vec![0.0; n];
    for j in 0..n - 1 {
        let r = modules[j].resistances;
        if j > 0 {
            let prev = modules[j - 1].resistances;
            for k in 0..j {
                a[j * n + k] = -(prev.r_hs + prev.r_ls);
            }
        }
        a[j * n + j] = -(r.r_b + r.r_ls + r.r_hs);
        a[j * n + j + 1] = modules[j + 1].resistances.r_b;
        b[j] = -r.r_ls * current;
    }
    for k in 0..n {
        a[(n - 1) * n + k] = 1.0;
    }
    b[n - 1] = current;
    let printed = solve(n, &a, &b).unwrap();
    let state: StringState = "S+ P P P".parse().unwrap();
    let oracle = nodal_oracle(&state, &modules, current).unwrap();
    let fast = solve_current_distribution(&state, &modules, current).unwrap();
    assert!(relative_gap(&fast.currents, &oracle.currents, current) <= 1e-12);
    assert!(relative_gap(&printed, &oracle.currents, current) > 1e-3);
}
