"""Network model, admittance assembly, and the power flow polynomial system."""

import json
import math

import numpy as np
import pytest

from gridroots.homotopy import TrackerConfig, filter_real, solve_all
from gridroots.pfmodel import (JSON_SCHEMA_VERSION, Branch, Bus, BusKind,
                               ModelError, Network, build_admittance,
                               build_pf_system, load_network,
                               network_from_json, network_to_dict,
                               network_to_json, recover_outputs, residual,
                               save_network)
from gridroots.polysys import degrees, total_degree
from oracles import complete_net, two_bus_net, two_bus_voltages


def single_branch_net(**kwargs):
    return Network(
        buses=(Bus(1, BusKind.SLACK), Bus(2, BusKind.PQ)),
        branches=(Branch(1, 2, **kwargs),))


def test_admittance_pure_reactance():
    adm = build_admittance(single_branch_net(r=0.0, x=0.1))
    assert np.allclose(adm.g, 0.0)
    assert np.allclose(adm.b, [[-10.0, 10.0], [10.0, -10.0]])


def test_admittance_hand_computed_branch():
    # y = 1/(0.03 + 0.10j) = (0.03 - 0.10j)/0.0109, half charging on the diagonal.
    adm = build_admittance(single_branch_net(r=0.03, x=0.10, b_shunt=0.005))
    y = (0.03 - 0.10j) / 0.0109
    mat = adm.g + 1j * adm.b
    assert np.allclose(mat[0, 1], -y)
    assert np.allclose(mat[1, 0], -y)
    assert np.allclose(mat[0, 0], y + 0.0025j)
    assert np.allclose(mat[1, 1], y + 0.0025j)


def test_admittance_branch_rows_sum_to_zero():
    net = complete_net(4, rs=[0.01, 0.02, 0.03, 0.04, 0.05, 0.06],
                       xs=[0.08, 0.09, 0.10, 0.11, 0.12, 0.13])
    adm = build_admittance(net)
    mat = adm.g + 1j * adm.b
    assert np.abs(mat.sum(axis=1)).max() < 1e-12


def test_admittance_complex_symmetric_without_transformers():
    net = complete_net(4, b_shunt=0.004)
    adm = build_admittance(net)
    assert np.allclose(adm.g, adm.g.T)
    assert np.allclose(adm.b, adm.b.T)


def test_admittance_transformer_tap():
    tau, theta = 1.05, 30.0
    adm = build_admittance(single_branch_net(r=0.03, x=0.10, b_shunt=0.005,
                                             tau=tau, theta_deg=theta))
    mat = adm.g + 1j * adm.b
    y = 1.0 / (0.03 + 0.10j)
    t = tau * np.exp(1j * math.radians(theta))
    assert np.allclose(mat[0, 0], (y + 0.0025j) / tau ** 2)
    assert np.allclose(mat[1, 1], y + 0.0025j)
    assert np.allclose(mat[0, 1], -y / np.conj(t))
    assert np.allclose(mat[1, 0], -y / t)


def test_admittance_bus_shunts_and_parallel_branches():
    net = Network(
        buses=(Bus(1, BusKind.SLACK), Bus(2, BusKind.PQ, shunt_g=0.2, shunt_b=-0.1)),
        branches=(Branch(1, 2, r=0.0, x=0.1), Branch(1, 2, r=0.0, x=0.1)))
    adm = build_admittance(net)
    mat = adm.g + 1j * adm.b
    assert np.allclose(mat[0, 1], 20.0j)  # two parallel lines accumulate
    assert np.allclose(mat[1, 1], -20.0j + (0.2 - 0.1j))


def test_model_validation_errors():
    with pytest.raises(ModelError, match="unknown bus"):
        build_admittance(Network((Bus(1, BusKind.SLACK), Bus(2, BusKind.PQ)),
                                 (Branch(1, 3, r=0.0, x=0.1),)))
    with pytest.raises(ModelError, match="not connected"):
        build_pf_system(Network(
            (Bus(1, BusKind.SLACK), Bus(2, BusKind.PQ), Bus(3, BusKind.PQ)),
            (Branch(1, 2, r=0.0, x=0.1),)))
    with pytest.raises(ModelError, match="Slack"):
        Network((Bus(1, BusKind.SLACK), Bus(2, BusKind.SLACK)),
                (Branch(1, 2, r=0.0, x=0.1),))
    with pytest.raises(ModelError, match="no gaps"):
        Network((Bus(1, BusKind.SLACK), Bus(3, BusKind.PQ)),
                (Branch(1, 3, r=0.0, x=0.1),))
    with pytest.raises(ModelError, match="x = 0"):
        Branch(1, 2, r=0.01, x=0.0)


def test_pf_system_shape_and_names():
    sys_ = build_pf_system(complete_net(3))
    assert sys_.num_vars == 4
    assert sys_.num_polys == 4
    assert sys_.var_names == ("Vd2", "Vq2", "Vd3", "Vq3")
    assert degrees(sys_) == (2, 2, 2, 2)
    assert total_degree(sys_) == 16


def test_flat_point_is_exact_for_zero_injection():
    net = complete_net(4)
    flat = np.array([1.0, 0.0, 1.0, 0.0, 1.0, 0.0])
    assert residual(net, flat) < 1e-14
    # Zero voltage magnitude also balances a pure-PQ zero-injection network.
    assert residual(net, np.zeros(6)) < 1e-14


def test_two_bus_oracle_residual():
    r, x, p, q = 0.03, 0.10, 0.5, 0.3
    net = two_bus_net(r, x, p, q)
    _, pairs = two_bus_voltages(r, x, p, q)
    assert len(pairs) == 2
    for vd, vq in pairs:
        assert residual(net, np.array([vd, vq])) < 1e-10
    vd, vq = pairs[0]
    assert residual(net, np.array([vd + 1e-3, vq])) > 1e-6


def test_per_unit_scaling_leaves_solutions_unchanged():
    r, x, p, q = 0.02, 0.08, 0.6, 0.2
    _, pairs = two_bus_voltages(r, x, p, q)
    scaled = two_bus_net(2.0 * r, 2.0 * x, p / 2.0, q / 2.0)
    for vd, vq in pairs:
        assert residual(scaled, np.array([vd, vq])) < 1e-12


def test_recover_outputs_flat_network():
    net = complete_net(4)
    out = recover_outputs(net, np.array([1.0, 0.0, 1.0, 0.0, 1.0, 0.0]))
    assert [o.bus_id for o in out] == [1, 2, 3, 4]
    for o in out:
        assert abs(o.p) < 1e-12 and abs(o.q) < 1e-12


def test_recover_outputs_two_bus_losses():
    r, x, p, q = 0.03, 0.10, 0.5, 0.3
    net = two_bus_net(r, x, p, q)
    _, pairs = two_bus_voltages(r, x, p, q)
    vd, vq = pairs[0]  # high-voltage solution
    v2 = vd + 1j * vq
    i = (1.0 - v2) / (r + 1j * x)
    loss = abs(i) ** 2
    slack = recover_outputs(net, np.array([vd, vq]))[0]
    assert slack.kind is BusKind.SLACK
    assert slack.p == pytest.approx(p + loss * r, abs=1e-9)
    assert slack.q == pytest.approx(q + loss * x, abs=1e-9)


def test_recover_outputs_pv_bus_self_consistency():
    # Solve a PV case, then retype the PV bus as PQ with the recovered Q:
    # the same voltages must still balance the rebuilt system.
    buses = (Bus(1, BusKind.SLACK, v_setpoint=1.02),
             Bus(2, BusKind.PQ, p_inject=-0.4, q_inject=-0.2),
             Bus(3, BusKind.PV, p_inject=0.3, v_setpoint=1.01))
    branches = (Branch(1, 2, r=0.02, x=0.08), Branch(2, 3, r=0.03, x=0.09),
                Branch(1, 3, r=0.01, x=0.07))
    net = Network(buses, branches, name="pv-case")
    sols = solve_all(build_pf_system(net), TrackerConfig(seed=3))
    reals = filter_real(sols, 1e-6)
    assert reals
    sol = np.real(reals[0])
    pv = recover_outputs(net, sol)[2]
    assert pv.kind is BusKind.PV
    retyped = Network(
        (buses[0], buses[1], Bus(3, BusKind.PQ, p_inject=0.3, q_inject=pv.q)),
        branches, name="pv-as-pq")
    assert residual(retyped, sol) < 1e-8
    assert abs(sol[2] ** 2 + sol[3] ** 2 - 1.01 ** 2) < 1e-8


def test_json_roundtrip(tmp_path):
    net = Network(
        buses=(Bus(1, BusKind.SLACK, v_setpoint=1.02),
               Bus(2, BusKind.PQ, p_inject=-0.5, q_inject=-0.3,
                   shunt_g=0.1, shunt_b=0.05),
               Bus(3, BusKind.PV, p_inject=0.3, v_setpoint=1.01)),
        branches=(Branch(1, 2, r=0.03, x=0.1, b_shunt=0.005),
                  Branch(2, 3, r=0.02, x=0.09, tau=1.04, theta_deg=-2.0),
                  Branch(1, 3, r=0.01, x=0.08)),
        name="roundtrip", seed=99, generator="unit-test")
    assert network_from_json(network_to_json(net)) == net
    path = tmp_path / "net.json"
    save_network(net, path)
    assert load_network(path) == net
    doc = network_to_dict(net)
    assert doc["version"] == JSON_SCHEMA_VERSION
    assert doc["buses"][0] == {"id": 1, "kind": "Slack", "p": 0.0, "q": 0.0,
                               "vset": 1.02, "gs": 0.0, "bs": 0.0}
    assert doc["branches"][1] == {"from": 2, "to": 3, "r": 0.02, "x": 0.09,
                                  "b": 0.0, "tau": 1.04, "theta_deg": -2.0}


def test_json_rejects_bad_documents():
    good = network_to_dict(two_bus_net(0.03, 0.1, 0.5, 0.3))
    with pytest.raises(ModelError, match="version"):
        network_from_json(json.dumps({**good, "version": 9}))
    bad_kind = {**good,
                "buses": [{**good["buses"][0], "kind": "XX"}, good["buses"][1]]}
    with pytest.raises(ModelError):
        network_from_json(json.dumps(bad_kind))
    with pytest.raises(ModelError):
        network_from_json("{not json")
