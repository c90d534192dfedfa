"""
Unit minors and every characteristic
====================================

A square submatrix with determinant +-1 stays invertible modulo every
prime, so the flattening rank, and the bound, hold in all characteristics.
"""

import tempfile

from koszulrank.certificate import read_certificate, write_certificate
from koszulrank.certify import certify_perm_finite_char, verify_certificate

out = tempfile.mkdtemp(prefix="koszulrank-")
for n in (4, 5):
    cert = certify_perm_finite_char(n)
    sub = cert.submatrices()["unit"]
    path = write_certificate(cert, out)
    print(f"perm_{n}: {sub['size']}x{sub['size']} minor with det {sub['det']} -> {path}")
    ok, msgs = verify_certificate(read_certificate(path), replay=False)
    print("  ", *msgs)
