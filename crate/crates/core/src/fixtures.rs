//! Built-in scenarios: the cupcake delivery problem collapsed to two states,
//! and a two-state coin problem with two point-mass hypotheses.

use crate::model::{Act, BeliefEntry, Event, Measure, Menu, PrizeSpace, Scenario, StateSpace, WeightedBeliefs};

/// Payoffs in states (one broken cake, ten broken cakes).
pub const DELIVERY_PAYOFFS: [(&str, [f64; 2]); 4] = [
    ("cont", [10000.0, -10000.0]),
    ("back", [0.0, 0.0]),
    ("check", [5001.0, -4999.0]),
    ("new", [20000.0, -20000.0]),
];

/// Delivery problem with beliefs {(Pr1, 1), (Pr10, `weight_ten`)}; Pr10 is
/// left out entirely when `weight_ten` is zero.
///
/// Menus: `M0` = {cont, back, check}, `M1` = M0 ∪ {new}.
/// Events: `one` = {one_broken}, `ten` = {ten_broken}.
pub fn delivery_with_weight(weight_ten: f64) -> Scenario {
    let states = StateSpace::new(["one_broken", "ten_broken"]).expect("static states");
    let prizes = PrizeSpace::from_utility_levels(DELIVERY_PAYOFFS.iter().flat_map(|(_, u)| u.iter().copied()))
        .expect("static prizes");
    let acts: Vec<Act> = DELIVERY_PAYOFFS
        .iter()
        .map(|(name, u)| Act::from_utilities(*name, u, &states, &prizes).expect("static act"))
        .collect();
    let m0 = Menu::new(acts[..3].to_vec()).expect("static menu");
    let m1 = Menu::new(acts.clone()).expect("static menu");
    let mut entries = vec![BeliefEntry::new("Pr1", Measure::point_mass(0, 2), 1.0)];
    if weight_ten > 0.0 {
        entries.push(BeliefEntry::new("Pr10", Measure::point_mass(1, 2), weight_ten));
    }
    let beliefs = WeightedBeliefs::new(entries).expect("static beliefs");
    let events = vec![
        ("one".to_string(), Event::new(2, [0]).expect("static event")),
        ("ten".to_string(), Event::new(2, [1]).expect("static event")),
    ];
    Scenario::new(
        states,
        prizes,
        acts,
        vec![("M0".into(), m0), ("M1".into(), m1)],
        beliefs,
        events,
    )
    .expect("delivery fixture is valid")
}

/// Delivery problem with both hypotheses at weight 1.
pub fn delivery() -> Scenario {
    delivery_with_weight(1.0)
}

/// States {s1, s2}; up = (1, 0), down = (0, 1); beliefs {(δ_s1, 1), (δ_s2, 1)};
/// menu `M` = {up, down}.
pub fn coin() -> Scenario {
    let states = StateSpace::new(["s1", "s2"]).expect("static states");
    let prizes = PrizeSpace::from_utility_levels([0.0, 1.0]).expect("static prizes");
    let up = Act::from_utilities("up", &[1.0, 0.0], &states, &prizes).expect("static act");
    let down = Act::from_utilities("down", &[0.0, 1.0], &states, &prizes).expect("static act");
    let menu = Menu::new(vec![up.clone(), down.clone()]).expect("static menu");
    let beliefs = WeightedBeliefs::new(vec![
        BeliefEntry::new("d1", Measure::point_mass(0, 2), 1.0),
        BeliefEntry::new("d2", Measure::point_mass(1, 2), 1.0),
    ])
    .expect("static beliefs");
    Scenario::new(
        states,
        prizes,
        vec![up, down],
        vec![("M".into(), menu)],
        beliefs,
        vec![],
    )
    .expect("coin fixture is valid")
}
