def common(a, b):
    bs = set(b)
    return [x for x in a if x in bs]
