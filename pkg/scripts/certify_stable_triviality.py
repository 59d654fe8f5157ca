"""Build Z+ and W for a gamma and certify boundary(W) == Z+.

usage: python scripts/certify_stable_triviality.py [theta|banana5|k4|FILE] [OUTDIR]
"""
import sys
from pathlib import Path

from ghl.cli import load_gamma
from ghl.complex import chain_to_text
from ghl.stab import verify_stable_triviality

gamma = load_gamma(sys.argv[1] if len(sys.argv) > 1 else "banana5")
cert = verify_stable_triviality(gamma)
text = cert.report()
print(text, end="")
if len(sys.argv) > 2:
    out = Path(sys.argv[2])
    out.mkdir(parents=True, exist_ok=True)
    (out / "Zplus.chain").write_text(chain_to_text(cert.Zplus))
    (out / "W.chain").write_text(chain_to_text(cert.W))
    (out / "certificate.txt").write_text(text)
sys.exit(0 if cert.certified else 1)
