import requests

BASE_URL = "https://api.example.org"


def fetch(path):
    resp = requests.get(BASE_URL + path)
    resp.raise_for_status()
    return resp.json()


def current(city):
    return fetch("/current?city=" + city)["temperature"]
