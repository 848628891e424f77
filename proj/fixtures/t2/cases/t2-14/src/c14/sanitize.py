import re

SECRET = re.compile(r"password=\S+")


def scrub(text):
    return re.sub(r"token=\S+", "token=***", text, re.IGNORECASE)


def scrub_all(lines):
    return [SECRET.sub("password=***", scrub(line)) for line in lines]
