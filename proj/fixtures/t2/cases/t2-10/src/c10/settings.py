import yaml


def read_config(path):
    with open(path) as fh:
        data = yaml.load(fh)
    return data or {}


def option(path, key, default=None):
    return read_config(path).get(key, default)
