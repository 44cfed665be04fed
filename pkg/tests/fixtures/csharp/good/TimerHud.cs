using UnityEngine;

public class TimerHud : MonoBehaviour
{
    [SerializeField] private float startSeconds = 90f;

    private float remaining;
    private bool running;

    public bool Expired { get; private set; }

    private void Start()
    {
        remaining = startSeconds;
        running = true;
    }

    private void Update()
    {
        if (!running || Expired)
        {
            return;
        }
        remaining -= Time.deltaTime;
        if (remaining <= 0f)
        {
            remaining = 0f;
            Expired = true;
        }
    }

    public void Pause()
    {
        running = false;
    }

    public void Resume()
    {
        if (!Expired)
        {
            running = true;
        }
    }

    public string FormatClock()
    {
        int minutes = Mathf.FloorToInt(remaining / 60f);
        int seconds = Mathf.FloorToInt(remaining % 60f);
        return string.Format("{0:00}:{1:00}", minutes, seconds);
    }
}
