"""Canonical forms and isomorphism decisions for graded Leavitt path algebras of small graphs."""
