"""Advance a convoy link by link and watch the assessments update.

Two sessions over the same network. The first rejects conditionalization:
each safe crossing reweights the surviving hypotheses for nearby links, so
quiet progress slowly raises the threat read on what lies ahead. The second
upholds it: observations substitute stored conditional probabilities and
everything else is left alone.
"""
from convoy.decision import DependencyModel, UtilitySpec, scale_link_probabilities
from convoy.fixtures import REFERENCE_ATTACK_PROBABILITY
from convoy.network import demo_network
from convoy.sequential import advance, create_session


def step(session, link_id, outcome):
    result = advance(session, link_id, outcome)
    where = session.current_node
    p9 = session.marginals["9"]
    if result is None:
        print(f"  crossed {link_id} ({outcome}): at {where}, walk complete")
    else:
        nxt = "-".join(result.recommended_route.link_ids)
        print(f"  crossed {link_id} ({outcome}): at {where}, "
              f"p9 = {p9:.6f}, next leg {nxt}")


def main():
    net = demo_network()
    marginals = scale_link_probabilities(
        net, "9", REFERENCE_ATTACK_PROBABILITY, round_2dp=True
    )
    utility = UtilitySpec("length-penalty", x_util=100.0)

    print("conditionalization rejected (wClear = 2, wIncident = 1, adjacent links):")
    session = create_session(
        net, marginals, utility=utility,
        poc_mode="rejected", w_clear=2.0, w_incident=1.0,
    )
    print(f"  start at {session.current_node}, p9 = {session.marginals['9']:.3f}")
    step(session, "1", "clear")
    step(session, "2", "clear")      # adjacent to 9, so p9 drops below 0.306
    step(session, "9", "clear")
    print(f"  revisions recorded: {session.revision}")

    print("\nconditionalization upheld (stored conditionals substitute):")
    model = DependencyModel(conditionals={("9", "2"): 0.50, ("3", "2"): 0.10})
    session = create_session(net, marginals, model=model, poc_mode="upheld")
    step(session, "1", "clear")
    before = session.marginals["9"]
    step(session, "2", "incident")   # p9 jumps to the stored p(9 | incident on 2)
    print(f"  p9 went {before:.3f} -> {session.marginals['9']:.3f} "
          f"on the incident report")
    step(session, "9", "clear")


if __name__ == "__main__":
    main()
