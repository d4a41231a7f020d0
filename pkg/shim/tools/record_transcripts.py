"""Record the golden protocol transcripts against a live echo server.

Run from the shim directory:

    python3 tools/record_transcripts.py > tests/golden_transcripts.json

The recorded bytes pin the wire format: canonical JSON serialization,
error wording, and status codes.  Re-record only when the protocol is
deliberately changed.
"""

import json
import sys
import urllib.error
import urllib.request

sys.path.insert(0, "src")
from modelshim.config import ShimConfig  # noqa: E402
from modelshim.service import serve  # noqa: E402

CASES = [
    ("health", "GET", "/v1/health", None),
    ("echo single", "POST", "/v1/normalize",
     {"lang": "en", "sentences": ["u r gr8"]}),
    ("echo batch order", "POST", "/v1/normalize",
     {"lang": "da", "sentences": ["første", "anden", "tredje"]}),
    ("echo verbatim spacing", "POST", "/v1/normalize",
     {"lang": "en", "sentences": ["two  spaces ", ""]}),
    ("echo empty batch", "POST", "/v1/normalize",
     {"lang": "en", "sentences": []}),
    ("missing sentences", "POST", "/v1/normalize", {"lang": "en"}),
    ("missing lang", "POST", "/v1/normalize", {"sentences": ["hi"]}),
    ("sentences not strings", "POST", "/v1/normalize",
     {"lang": "en", "sentences": ["hi", 5]}),
    ("body not an object", "POST", "/v1/normalize", ["hi"]),
    ("body not json", "POST", "/v1/normalize", "RAW:{nope"),
    ("unknown endpoint", "GET", "/v1/models", None),
]


def run_case(base_url, method, path, payload):
    data = None
    if payload is not None:
        if isinstance(payload, str) and payload.startswith("RAW:"):
            data = payload[4:].encode("utf-8")
        else:
            data = json.dumps(payload).encode("utf-8")
    req = urllib.request.Request(
        base_url + path, data=data, method=method,
        headers={"Content-Type": "application/json"} if data else {},
    )
    try:
        with urllib.request.urlopen(req, timeout=5.0) as resp:
            return resp.status, resp.read()
    except urllib.error.HTTPError as exc:
        return exc.code, exc.read()


def main():
    entries = []
    with serve(ShimConfig(echo_mode=True)) as server:
        server.wait_ready(5)
        for name, method, path, payload in CASES:
            if payload is None:
                request = None
            elif isinstance(payload, str) and payload.startswith("RAW:"):
                request = payload[4:]
            else:
                request = json.dumps(payload)
            status, body = run_case(server.base_url, method, path, payload)
            entries.append({
                "name": name,
                "method": method,
                "path": path,
                "request": request,
                "status": status,
                "response": body.decode("utf-8"),
            })
    json.dump(entries, sys.stdout, indent=2, ensure_ascii=False)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
