from hypothesis import settings

# mpmath oracles are slow; fixed example streams keep runs reproducible
settings.register_profile("repo", deadline=None, derandomize=True, max_examples=100)
settings.load_profile("repo")
