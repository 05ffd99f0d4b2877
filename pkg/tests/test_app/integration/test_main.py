from http import HTTPStatus

import pytest


def _request(tiny_config, **changes):
    return {"config": {**tiny_config, **changes}, "seed": 1}


def test_root(client):
    response = client.get("/v1/")
    assert response.status_code == HTTPStatus.OK
    body = response.json()
    assert body["message"] == "Fiber lattice lab"
    assert body["potentials"] == ["cauchy", "projection"]
    assert body["samplers"] == ["naive", "shells"]
    assert "converge-sigma" in body["studies"]


def test_validate_params(client):
    response = client.post("/v1/params/validate",
                           json={"d": 2, "s": 0.5, "p": 2.0, "C_tilde": 0.5, "eps": 0.125})
    assert response.status_code == HTTPStatus.OK
    assert response.json()["valid"] is True
    assert response.json()["derived"]["probability"] == -3.0


def test_validate_params_lists_violations(client):
    response = client.post("/v1/params/validate",
                           json={"d": 2, "s": 0.5, "p": 2.0, "ell": 4.0, "C_tilde": 0.5})
    assert response.status_code == HTTPStatus.UNPROCESSABLE_ENTITY
    assert "weight_exponent" in [v["name"] for v in response.json()["detail"]]


@pytest.mark.parametrize("include_edges", [False, True])
def test_sample_fibers(client, tiny_config, include_edges):
    response = client.post("/v1/fibers/sample", params={"include_edges": include_edges},
                           json=_request(tiny_config))
    assert response.status_code == HTTPStatus.OK
    body = response.json()
    assert (body["eps"], body["seed"], body["nodes"]) == (0.25, 1, 9)
    if include_edges:
        assert len(body["edges"]) == body["edge_count"]
    else:
        assert body["edges"] is None


def test_energy(client, tiny_config):
    response = client.post("/v1/energy", json={**_request(tiny_config), "eps": 0.125})
    assert response.status_code == HTTPStatus.OK
    body = response.json()
    assert body["nodes"] == 49
    energy = body["energy"]
    assert energy["total"] == pytest.approx(energy["e_nonlocal"] + energy["e_local"]
                                            - energy["work"])


def test_minimize(client, tiny_config):
    response = client.post("/v1/minimize", json=_request(tiny_config))
    assert response.status_code == HTTPStatus.OK
    body = response.json()
    assert body["converged"] is True
    assert body["method"] == "quadratic"
    assert body["energy"]["total"] <= 0.0


def test_minimize_without_convergence(client, tiny_config):
    response = client.post("/v1/minimize", json={**_request(tiny_config), "eps": 0.125,
                                                 "tol": 1e-14, "maxiter": 1})
    assert response.status_code == HTTPStatus.BAD_REQUEST
    assert response.json()["detail"].startswith("MaxIterations")


def test_limit_energy_of_zero_displacement(client, tiny_config):
    response = client.post("/v1/limit-energy", json={"config": {**tiny_config,
                                                                "displacement": "zero"},
                                                     "resolution": 4})
    assert response.status_code == HTTPStatus.OK
    assert response.json() == {"e_nonlocal": 0.0, "e_local": 0.0, "work": 0.0, "total": 0.0}


@pytest.mark.parametrize("changes,expected_status", [
    ({"domain": {"lower": [0.0, 1.0], "upper": [1.0, 1.0]}}, HTTPStatus.BAD_REQUEST),
    ({"potential": "harmonic"}, HTTPStatus.UNPROCESSABLE_ENTITY),
    ({"sampler": "gibbs"}, HTTPStatus.UNPROCESSABLE_ENTITY),
    ({"eps_sequence": []}, HTTPStatus.UNPROCESSABLE_ENTITY),
])
def test_bad_configs(client, tiny_config, changes, expected_status):
    response = client.post("/v1/energy", json=_request(tiny_config, **changes))
    assert response.status_code == expected_status
