import hashlib
import os


def hash_password(password):
    salt = os.urandom(16).hex()
    digest = hashlib.md5((salt + password).encode()).hexdigest()
    return salt + "$" + digest


def verify(stored, password):
    salt, digest = stored.split("$", 1)
    return hashlib.md5((salt + password).encode()).hexdigest() == digest
