#!/usr/bin/env python3
# Copyright 2026 The QPMeL Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Download dataset files listed in a JSON manifest and verify their checksums.

Manifest format::

    {
      "files": [
        {"url": "https://.../train-images-idx3-ubyte.gz",
         "sha256": "<hex digest of the downloaded bytes>",
         "output": "mnist/train-images-idx3-ubyte",
         "gunzip": true}
      ]
    }

Output paths are relative to the manifest's directory unless absolute. A file
whose checksum does not match is deleted and the script exits with status 1.
Nothing in the test suite depends on this script; tests use bundled files.
"""

import argparse
import gzip
import hashlib
import json
import sys
import urllib.request
from pathlib import Path


def fetch(entry, base):
    out = Path(entry["output"])
    if not out.is_absolute():
        out = base / out
    out.parent.mkdir(parents=True, exist_ok=True)
    with urllib.request.urlopen(entry["url"], timeout=60) as resp:
        payload = resp.read()
    digest = hashlib.sha256(payload).hexdigest()
    if digest != entry["sha256"].lower():
        raise ValueError(f"{entry['url']}: sha256 {digest} does not match {entry['sha256']}")
    if entry.get("gunzip", False):
        payload = gzip.decompress(payload)
    out.write_bytes(payload)
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("manifest", type=Path)
    args = parser.parse_args()
    manifest = json.loads(args.manifest.read_text())
    base = args.manifest.resolve().parent
    for entry in manifest["files"]:
        try:
            print(f"wrote {fetch(entry, base)}")
        except (OSError, ValueError) as err:
            print(f"error: {err}", file=sys.stderr)
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
