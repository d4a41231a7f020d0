"""Protocol behaviour of the service itself, echo mode only."""

import json
import threading
import time
import urllib.error
import urllib.request

import pytest

from modelshim.config import ConfigError, ShimConfig, parse_lang_map
from modelshim.service import Faults, canonical_json, serve


def post(url, body, timeout=5.0):
    """(status, raw body bytes) for a POST; body bytes sent verbatim."""
    if isinstance(body, (dict, list)):
        body = json.dumps(body).encode()
    req = urllib.request.Request(
        url + "/v1/normalize", data=body,
        headers={"Content-Type": "application/json"},
    )
    try:
        with urllib.request.urlopen(req, timeout=timeout) as resp:
            return resp.status, resp.read()
    except urllib.error.HTTPError as exc:
        return exc.code, exc.read()


def get(url, path, timeout=5.0):
    try:
        with urllib.request.urlopen(url + path, timeout=timeout) as resp:
            return resp.status, resp.read()
    except urllib.error.HTTPError as exc:
        return exc.code, exc.read()


@pytest.fixture(scope="module")
def echo_url():
    with serve(ShimConfig(echo_mode=True)) as server:
        server.wait_ready(5)
        yield server.base_url


def test_health(echo_url):
    status, body = get(echo_url, "/v1/health")
    assert status == 200
    assert json.loads(body) == {"model": "echo", "status": "ok"}


def test_echo_is_verbatim(echo_url):
    status, body = post(echo_url, {"lang": "en", "sentences": ["a  b ", "x"]})
    assert status == 200
    # no whitespace tidying on the server side: echo means echo
    assert json.loads(body)["normalized"] == ["a  b ", "x"]


def test_empty_sentence_list(echo_url):
    status, body = post(echo_url, {"lang": "en", "sentences": []})
    assert status == 200
    assert json.loads(body)["normalized"] == []


@pytest.mark.parametrize(
    "body",
    [
        {"lang": "en"},
        {"sentences": ["hi"]},
        {"lang": "", "sentences": ["hi"]},
        {"lang": 3, "sentences": ["hi"]},
        {"lang": "en", "sentences": "hi"},
        {"lang": "en", "sentences": ["hi", 7]},
        ["not", "an", "object"],
    ],
)
def test_schema_violations_get_400(echo_url, body):
    status, raw = post(echo_url, body)
    assert status == 400
    assert "error" in json.loads(raw)


def test_invalid_json_gets_400(echo_url):
    status, raw = post(echo_url, b"{nope")
    assert status == 400
    assert json.loads(raw) == {"error": "request body is not valid JSON"}


def test_unknown_paths_get_404(echo_url):
    assert get(echo_url, "/v2/health")[0] == 404
    assert post(echo_url + "/extra", {"lang": "en", "sentences": []})[0] == 404


def test_large_requests_are_micro_batched():
    with serve(ShimConfig(echo_mode=True, max_batch=2)) as server:
        server.wait_ready(5)
        sentences = [f"s{i}" for i in range(5)]
        status, body = post(server.base_url, {"lang": "en", "sentences": sentences})
        assert status == 200
        assert json.loads(body)["normalized"] == sentences
        assert server.state.engine.calls == [2, 2, 1]


def test_normalize_is_503_until_ready():
    with serve(ShimConfig(echo_mode=True), warmup_seconds=1.0) as server:
        status, body = post(server.base_url, {"lang": "en", "sentences": ["x"]})
        assert status == 503
        assert json.loads(body) == {"error": "model is loading"}
        status, body = get(server.base_url, "/v1/health")
        assert status == 200
        assert json.loads(body) == {"model": None, "status": "loading"}
        server.wait_ready(5)
        assert post(server.base_url, {"lang": "en", "sentences": ["x"]})[0] == 200


def test_health_responsive_during_slow_request():
    faults = Faults(slow_first=1, slow_seconds=1.0)
    with serve(ShimConfig(echo_mode=True), faults=faults) as server:
        server.wait_ready(5)
        started = threading.Event()

        def slow_call():
            started.set()
            post(server.base_url, {"lang": "en", "sentences": ["x"]})

        t = threading.Thread(target=slow_call)
        t.start()
        started.wait()
        time.sleep(0.1)  # let the slow request reach the engine
        t0 = time.monotonic()
        status, _ = get(server.base_url, "/v1/health")
        elapsed = time.monotonic() - t0
        t.join()
        assert status == 200
        assert elapsed < 0.5


def test_canonical_json_ignores_key_order():
    a = canonical_json({"b": 1, "a": [1, 2]})
    b = canonical_json({"a": [1, 2], "b": 1})
    assert a == b == b'{"a":[1,2],"b":1}'


def test_config_requires_model_or_echo():
    with pytest.raises(ConfigError):
        ShimConfig()
    with pytest.raises(ConfigError):
        ShimConfig(echo_mode=True, max_batch=0)
    with pytest.raises(ConfigError):
        ShimConfig(echo_mode=True, beam_size=0)


def test_parse_lang_map():
    assert parse_lang_map("") == {}
    assert parse_lang_map("en=en_XX,da=da_DK") == {"en": "en_XX", "da": "da_DK"}
    with pytest.raises(ConfigError):
        parse_lang_map("en")
    with pytest.raises(ConfigError):
        parse_lang_map("en=")
