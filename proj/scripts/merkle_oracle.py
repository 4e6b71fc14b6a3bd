#!/usr/bin/env python3
"""Cross-language audit of the ledger files.

Runs the CLI to simulate a small campaign, then recomputes every payload
commitment, batch root, anchor digest and one inclusion proof from the raw
files using hashlib only. Any divergence between this reimplementation and
the C++ one fails the check.

Usage: merkle_oracle.py <path-to-cli>
"""

import hashlib
import subprocess
import sys
import tempfile
from pathlib import Path

FIELD_SEP = b"\x1f"
RECORD_SEP = b"\x1e"


def sha(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def leaf(data: bytes) -> bytes:
    return sha(b"\x00" + data)


def node(left: bytes, right: bytes) -> bytes:
    return sha(b"\x01" + left + right)


def tree_root(leaves: list) -> bytes:
    """Binary tree with duplicate-last padding; empty commits to sha(0x02)."""
    level = leaves if leaves else [sha(b"\x02")]
    while len(level) > 1:
        level = [
            node(level[i], level[i + 1] if i + 1 < len(level) else level[i])
            for i in range(0, len(level), 2)
        ]
    return level[0]


def payload_commitment(payload_bytes: bytes) -> bytes:
    """Field tree: one 0x02-domain leaf per name/value chunk, in file order
    (the writer already canonicalizes to sorted order)."""
    leaves = []
    for chunk in payload_bytes.split(RECORD_SEP):
        if chunk:
            leaves.append(sha(b"\x02" + chunk))
    return tree_root(leaves)


def envelope_bytes(cols: list) -> bytes:
    event_id, kind, wallet, ts, subject, role, commitment, meta_fp, meta_dataset, _ = cols
    fields = {
        "event_id": event_id,
        "kind": kind,
        "payload_commitment": commitment,
        "role": role,
        "subject": subject,
        "ts": ts,
        "wallet": wallet,
    }
    if meta_dataset != "-":
        fields["meta_dataset"] = meta_dataset
    if meta_fp != "-":
        fields["meta_fp"] = meta_fp
    out = b""
    for name in sorted(fields):
        out += name.encode() + FIELD_SEP + fields[name].encode() + RECORD_SEP
    return out


def fail(message: str) -> None:
    print(f"merkle_oracle: MISMATCH: {message}")
    sys.exit(1)


def main() -> None:
    if len(sys.argv) != 2:
        print(f"usage: {sys.argv[0]} <path-to-cli>")
        sys.exit(2)
    cli = sys.argv[1]

    with tempfile.TemporaryDirectory(prefix="foodprov-oracle-") as tmp:
        root = Path(tmp) / "ws"
        run = subprocess.run(
            [cli, "--workspace", str(root), "simulate", "--seed", "13",
             "--submissions", "120", "--batch-size", "16", "--anchor-every", "2"],
            capture_output=True, text=True)
        if run.returncode != 0:
            fail(f"simulate exited {run.returncode}: {run.stderr.strip()}")

        event_lines = [l for l in (root / "events.log").read_text().splitlines() if l]
        envelopes = []
        for lineno, line in enumerate(event_lines):
            cols = line.split("\t")
            if len(cols) != 10:
                fail(f"events.log:{lineno + 1}: {len(cols)} columns")
            payload = b"" if cols[9] == "-" else bytes.fromhex(cols[9])
            recomputed = payload_commitment(payload).hex()
            if recomputed != cols[6]:
                fail(f"event {cols[0]}: payload commitment {cols[6]} != {recomputed}")
            envelopes.append(envelope_bytes(cols))

        batch_roots = []
        batch_lines = [l for l in (root / "commitments.txt").read_text().splitlines() if l]
        for line in batch_lines:
            batch_id, first, last, leaf_count, root_hex = line.split("\t")
            first, last = int(first), int(last)
            if int(leaf_count) != last - first + 1:
                fail(f"batch {batch_id}: leaf count {leaf_count} over [{first},{last}]")
            recomputed = tree_root([leaf(e) for e in envelopes[first:last + 1]]).hex()
            if recomputed != root_hex:
                fail(f"batch {batch_id}: root {root_hex} != {recomputed}")
            batch_roots.append(bytes.fromhex(root_hex))

        anchor_lines = [l for l in (root / "anchors.txt").read_text().splitlines() if l]
        for line in anchor_lines:
            anchor_id, first, last, digest_hex, _ts = line.split("\t")
            covered = b"".join(batch_roots[int(first):int(last) + 1])
            recomputed = sha(covered).hex()
            if recomputed != digest_hex:
                fail(f"anchor {anchor_id}: digest {digest_hex} != {recomputed}")

        # one inclusion proof, folded here instead of trusting the producer
        probe = len(envelopes) // 2
        run = subprocess.run(
            [cli, "--workspace", str(root), "prove", "--event", str(probe)],
            capture_output=True, text=True)
        if run.returncode != 0:
            fail(f"prove exited {run.returncode}: {run.stderr.strip()}")
        current = None
        claimed_root = None
        for line in run.stdout.splitlines():
            cols = line.split("\t")
            if cols[0] == "envelope":
                if bytes.fromhex(cols[1]) != envelopes[probe]:
                    fail(f"prove envelope differs from events.log for {probe}")
                current = leaf(bytes.fromhex(cols[1]))
            elif cols[0] == "step":
                sibling = bytes.fromhex(cols[2])
                current = node(sibling, current) if cols[1] == "l" else node(current, sibling)
            elif cols[0] == "batch":
                claimed_root = bytes.fromhex(cols[5])
        if current is None or claimed_root is None or current != claimed_root:
            fail(f"inclusion proof for event {probe} does not fold to the batch root")

        print(f"ok: {len(event_lines)} events, {len(batch_lines)} batches, "
              f"{len(anchor_lines)} anchors cross-checked")


if __name__ == "__main__":
    main()
