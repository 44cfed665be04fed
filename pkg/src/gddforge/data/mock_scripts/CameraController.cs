using UnityEngine;

public class CameraController : MonoBehaviour
{
    [SerializeField] private Transform target;
    [SerializeField] private Vector3 offset = new Vector3(0f, 1.5f, -10f);
    [SerializeField] private float smoothTime = 0.25f;
    [SerializeField] private Vector2 minBounds = new Vector2(-50f, -10f);
    [SerializeField] private Vector2 maxBounds = new Vector2(50f, 20f);

    private Vector3 velocity = Vector3.zero;

    private void LateUpdate()
    {
        if (target == null)
        {
            return;
        }
        Vector3 desired = ClampToBounds(target.position + offset);
        transform.position = Vector3.SmoothDamp(transform.position, desired, ref velocity, smoothTime);
    }

    public void SetTarget(Transform newTarget)
    {
        target = newTarget;
    }

    public void SnapToTarget()
    {
        if (target != null)
        {
            transform.position = ClampToBounds(target.position + offset);
        }
    }

    private Vector3 ClampToBounds(Vector3 position)
    {
        float x = Mathf.Clamp(position.x, minBounds.x, maxBounds.x);
        float y = Mathf.Clamp(position.y, minBounds.y, maxBounds.y);
        return new Vector3(x, y, position.z);
    }
}
