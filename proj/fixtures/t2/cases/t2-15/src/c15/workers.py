import threading


def poll(queue):
    while queue:
        queue.pop()


def start(queue):
    t = threading.Thread(target=poll(queue))
    t.start()
    return t
