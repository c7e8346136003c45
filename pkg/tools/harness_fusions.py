"""Two deterministic fusion styles standing in for two systems."""


def fusion_a(raw: str, synthetic: str) -> str:
    raw_words = raw.split()
    syn_words = synthetic.split()
    half_s = len(syn_words) // 2
    half_r = len(raw_words) // 2
    return " ".join(
        ["A", "detailed", "scene:"]
        + syn_words[:half_s]
        + raw_words[:half_r]
        + ["set", "against"]
        + syn_words[half_s:]
        + raw_words[half_r:]
    )


def fusion_b(raw: str, synthetic: str) -> str:
    raw_words = raw.split()
    syn_words = synthetic.split()
    half_s = len(syn_words) // 2
    half_r = len(raw_words) // 2
    return " ".join(
        ["The", "picture", "shows"]
        + syn_words[:half_s]
        + raw_words[half_r:]
        + ["framed", "by"]
        + syn_words[half_s:]
        + raw_words[:half_r]
    )
