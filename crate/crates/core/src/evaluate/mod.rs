//! Exact and sampled evaluation of strategy profiles, and best responses.

pub mod belief;
pub mod chain;
pub mod linear;
pub mod mdp;
pub mod montecarlo;

pub use belief::{belief_support_mdp, pomdp_qualitative, Question, Support, SupportMdp};
pub use chain::{chain_probability, player_move, product_chain, ChainState, ProductChain};
pub use mdp::{best_response_product, mdp_optimal, AdversarialProduct, MdpSolution, Optimise, ProductState};
pub use montecarlo::{monte_carlo, monte_carlo_with_workers, wilson_interval, Estimate};

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::arena::Side;
    use crate::conditions::{ColourSet, Condition};
    use crate::gallery;
    use crate::rational::rat;
    use crate::strategy::mixed_from_support;

    fn colour(arena: &crate::Arena, name: &str) -> ColourSet {
        ColourSet::singleton(arena.colour_index(name).unwrap())
    }

    #[test]
    fn dui_uniform_is_one_quarter_and_mixed_is_zero() {
        let dui = gallery::dui();
        let start = dui.vertex_index("start").unwrap();
        let eve = gallery::uniform_behavioural(&dui, Side::Eve);
        let adam = gallery::uniform_behavioural(&dui, Side::Adam);
        let reach = Condition::Reach(colour(&dui, "circ"));
        let chain = product_chain(&dui, &eve, &adam, start).unwrap();
        assert_eq!(chain_probability(&chain, &reach), rat(1, 4));

        let stay = gallery::constant(&dui, Side::Eve, "stay").unwrap();
        let leave = gallery::constant(&dui, Side::Eve, "leave").unwrap();
        let mixed = mixed_from_support(Side::Eve, &[(rat(1, 2), &stay), (rat(1, 2), &leave)]).unwrap();
        let chain = product_chain(&dui, &mixed, &adam, start).unwrap();
        assert_eq!(chain_probability(&chain, &reach), rat(0, 1));
        assert_eq!(chain_probability(&chain, &Condition::Reach(colour(&dui, "cross"))), rat(1, 1));
    }

    #[test]
    fn fig1_uniform_against_uniform_is_one_half() {
        let fig1 = gallery::fig1();
        let init = fig1.vertex_index("init").unwrap();
        let eve = gallery::uniform_behavioural(&fig1, Side::Eve);
        let adam = gallery::uniform_behavioural(&fig1, Side::Adam);
        let chain = product_chain(&fig1, &eve, &adam, init).unwrap();
        assert_eq!(chain_probability(&chain, &Condition::Reach(colour(&fig1, "circ"))), rat(1, 2));
    }

    #[test]
    fn fig1_four_memory_is_buchi_almost_sure_but_not_against_full_information() {
        let fig1 = gallery::fig1();
        let init = fig1.vertex_index("init").unwrap();
        let eve = gallery::four_memory_fig1(&fig1).unwrap();
        let adam = gallery::uniform_behavioural(&fig1, Side::Adam);
        let chain = product_chain(&fig1, &eve, &adam, init).unwrap();
        let circ = colour(&fig1, "circ");
        assert_eq!(chain_probability(&chain, &Condition::Buchi(circ)), rat(1, 1));

        let product = best_response_product(&fig1, &eve, init).unwrap();
        let cross = fig1.vertex_index("cross").unwrap();
        let reachable = product.reachable();
        assert!(product.states().iter().zip(&reachable).all(|(s, &r)| !r || s.vertex != cross));
        let sol = mdp_optimal(&product, &Condition::Buchi(circ), Optimise::Min).unwrap();
        assert!(sol.initial_value_zero());
        assert_eq!(sol.initial_value(), 0.0);
    }

    #[test]
    fn snowball_epsilon_run_best_response() {
        let snow = gallery::snowball();
        let init = snow.vertex_index("init").unwrap();
        let adam = gallery::biased(&snow, Side::Adam, "run", rat(1, 10)).unwrap();
        let product = best_response_product(&snow, &adam, init).unwrap();
        assert_eq!(product.controller(), Side::Eve);
        let left = Condition::Reach(colour(&snow, "safe"));
        let sol = mdp_optimal(&product, &left, Optimise::Max).unwrap();
        assert!((sol.initial_value() - 0.1).abs() < 1e-9, "{}", sol.initial_value());
        assert!(!sol.initial_value_one() && !sol.initial_value_zero());
    }

    #[test]
    fn support_mdp_for_never_throw_is_lost_almost_surely() {
        let snow = gallery::snowball();
        let init = snow.vertex_index("init").unwrap();
        let cross = snow.vertex_index("cross").unwrap();
        let wait = gallery::constant(&snow, Side::Eve, "wait").unwrap();
        let mdp = belief_support_mdp(&snow, &wait, init).unwrap();
        assert!(mdp.supports().iter().all(|s| s.configs.len() == 1));
        let bad = BTreeSet::from([cross]);
        assert!(pomdp_qualitative(&mdp, &bad, Question::AlmostSureReach).unwrap());
        let all: BTreeSet<_> = (0..snow.vertex_count()).collect();
        assert!(pomdp_qualitative(&mdp, &all, Question::AlmostSureReach).unwrap());
        assert!("sure_reach".parse::<Question>().unwrap_err().is_unsupported());
    }

    #[test]
    fn monte_carlo_is_reproducible_and_close() {
        let dui = gallery::dui();
        let start = dui.vertex_index("start").unwrap();
        let eve = gallery::uniform_behavioural(&dui, Side::Eve);
        let adam = gallery::uniform_behavioural(&dui, Side::Adam);
        let reach = Condition::Reach(colour(&dui, "circ"));
        let a = monte_carlo_with_workers(&dui, &eve, &adam, start, &reach, 2, 20_000, 7, 3).unwrap();
        let b = monte_carlo_with_workers(&dui, &eve, &adam, start, &reach, 2, 20_000, 7, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.ci_low <= 0.25 && 0.25 <= a.ci_high, "{a:?}");
        let none = Condition::Safety(ColourSet::EMPTY);
        assert_eq!(monte_carlo(&dui, &eve, &adam, start, &none, 3, 10, 1).unwrap().point, 1.0);
        let buchi = Condition::Buchi(colour(&dui, "circ"));
        assert!(monte_carlo(&dui, &eve, &adam, start, &buchi, 3, 10, 1).unwrap_err().is_unsupported());
    }

    #[test]
    fn pure_memoryless_chain_is_dirac_per_state() {
        let fig1 = gallery::fig1();
        let eve = gallery::constant(&fig1, Side::Eve, "a").unwrap();
        let adam = gallery::constant(&fig1, Side::Adam, "B").unwrap();
        let chain = product_chain(&fig1, &eve, &adam, 0).unwrap();
        assert!((0..chain.len()).all(|i| chain.step(i).is_dirac()));
    }
}
