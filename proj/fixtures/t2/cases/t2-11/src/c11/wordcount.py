def count_words(path):
    fh = open(path)
    words = 0
    for line in fh:
        words += len(line.split())
    return words


def report(paths):
    return {p: count_words(p) for p in paths}
