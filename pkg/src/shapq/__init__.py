"""Exact Shapley values of database facts for aggregate conjunctive queries."""
