"""Maximum feasible t-matchings excluding prescribed t-factors."""
